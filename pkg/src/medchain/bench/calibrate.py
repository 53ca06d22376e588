"""Difficulty calibration against a per-block processing-time target.

The probe measures the local sealing hash rate H; expected solve time for
difficulty d is 2^d / H. Per-block processing also includes the miner's
batch window, a known constant, so calibration aims the solve time at the
geometric mean of the target range minus that window and picks the d whose
expected solve lands closest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from medchain.chain.pow import measure_hash_rate


@dataclass(frozen=True)
class CalibrationResult:
    difficulty_bits: int
    hash_rate: float
    expected_solve_ms: float
    expected_block_ms: float
    target_low_s: float
    target_high_s: float

    def to_json(self) -> dict:
        return {
            "difficulty_bits": self.difficulty_bits,
            "hash_rate": round(self.hash_rate, 1),
            "expected_solve_ms": round(self.expected_solve_ms, 1),
            "expected_block_ms": round(self.expected_block_ms, 1),
            "target_low_s": self.target_low_s,
            "target_high_s": self.target_high_s,
        }


def calibrate_difficulty(
    target_range: tuple[float, float],
    probe_ms: int = 1500,
    batch_window_ms: int = 600,
    max_bits: int = 48,
) -> CalibrationResult:
    low_s, high_s = target_range
    if not low_s < high_s:
        raise ValueError("target range requires low < high")
    if probe_ms < 100:
        raise ValueError("probe must be at least 100 ms")
    hash_rate = measure_hash_rate(probe_ms)
    goal_s = math.sqrt(max(low_s, 1e-9) * high_s)
    # The batch window is a fixed part of every block's wall time; aim the
    # solve component at what remains of the goal.
    solve_goal_s = max(goal_s - batch_window_ms / 1000.0, 0.0)
    best = min(range(max_bits + 1), key=lambda d: abs((2**d) / hash_rate - solve_goal_s))
    expected_solve_ms = (2**best) / hash_rate * 1000.0
    result = CalibrationResult(
        difficulty_bits=best,
        hash_rate=hash_rate,
        expected_solve_ms=expected_solve_ms,
        expected_block_ms=expected_solve_ms + (batch_window_ms if best > 0 else 0),
        target_low_s=low_s,
        target_high_s=high_s,
    )
    print(
        f"calibrate: hash rate {hash_rate:,.0f} H/s, difficulty {best} bits, "
        f"expected solve {expected_solve_ms:,.0f} ms, "
        f"expected block {result.expected_block_ms:,.0f} ms "
        f"(target {low_s}-{high_s} s)"
    )
    return result
