"""Consortium blockchain for RBAC management of CAD medical data.

The package is organised around five pieces:

- ``medchain.chain``: content-addressed blocks, proof-of-work sealing and
  structural chain validation.
- ``medchain.contract``: the deterministic RBAC state machine whose state is
  derived purely from the chain.
- ``medchain.node``: the consortium node runtime (mempool, gossip, mining,
  sync).
- ``medchain.gateway``: the HTTP facade serving access decisions and
  role-projected patient records.
- ``medchain.bench``: the four-node latency experiment harness.
"""

__version__ = "0.1.0"
