from medchain.bench.config import BenchConfig
from medchain.bench.calibrate import CalibrationResult, calibrate_difficulty
from medchain.bench.runner import BenchRecord, run_benchmark

__all__ = [
    "BenchConfig",
    "CalibrationResult",
    "calibrate_difficulty",
    "BenchRecord",
    "run_benchmark",
]
