"""Batch SHA-256 kernels for the exhaustive key searches.

Two interchangeable backends provide ``compress_batch(states, blocks)``,
the SHA-256 compression applied lane-wise across N candidates:

* ``numba``: scalar per-lane loops compiled with ``@njit`` (fast path);
* ``numpy``: the same rounds vectorised across lanes (always available).

Selection honours the ``AKA5G_NUMBA`` environment variable: ``0`` forces
the numpy fallback, ``1`` requires numba (error if missing), unset picks
numba when importable. Both backends are bit-identical; the test suite
checks them against hashlib and against each other.
"""

from __future__ import annotations

import os

ENV_FLAG = "AKA5G_NUMBA"

_FALSY = ("0", "off", "false", "no")
_TRUTHY = ("1", "on", "true", "yes", "require")


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def backend_name(override: str | None = None) -> str:
    """Resolve the active backend: explicit override > env flag > auto."""
    if override is not None:
        if override not in ("numba", "numpy"):
            raise ValueError(f"unknown kernel backend {override!r}")
        if override == "numba" and not numba_available():
            raise RuntimeError("numba backend requested but numba is not importable")
        return override
    env = os.environ.get(ENV_FLAG, "").strip().lower()
    if env in _FALSY:
        return "numpy"
    if env in _TRUTHY:
        if not numba_available():
            raise RuntimeError(f"{ENV_FLAG}={env} but numba is not importable")
        return "numba"
    return "numba" if numba_available() else "numpy"


def get_compress(backend: str | None = None):
    """Return (name, compress_batch) for the resolved backend."""
    name = backend_name(backend)
    if name == "numba":
        from .sha256_numba import compress_batch
    else:
        from .sha256_numpy import compress_batch
    return name, compress_batch
