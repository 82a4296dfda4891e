"""uavchain: trust-ranked, quantum-resilient blockchain simulator for UAV
edge networks.

Protocol layers (crypto provider, ledger, trust, consensus) are plain pure
modules; `engine` binds them into a deterministic discrete-event simulation
and `cli` exposes runs, sweeps, figure data and ledger audits.
"""

__version__ = "0.1.0"
