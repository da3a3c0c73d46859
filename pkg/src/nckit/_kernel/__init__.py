"""Kernel backend selection.

Imports the compiled enumeration kernels when the extension built, and falls
back to the pure-Python reference otherwise.  Setting ``NCKIT_PURE=1`` skips
the extension even when present, which is how the parity tests and the
benchmark pin each side.  Both backends are observably identical; ``BACKEND``
records which one loaded.
"""

from __future__ import annotations

import os
from array import array

from nckit.gf import FieldSpec

if os.environ.get("NCKIT_PURE", "") not in ("", "0"):
    from nckit._kernel import pure as _impl
else:
    try:
        from nckit._kernel import _ckernel as _impl  # type: ignore[no-redef]
    except ImportError:
        from nckit._kernel import pure as _impl

BACKEND: str = _impl.NAME

mix64 = _impl.mix64
draw = _impl.draw
count_nonzero_slots = _impl.count_nonzero_slots
count_rank_success = _impl.count_rank_success


_MASK = (1 << 64) - 1
_TRIAL_STRIDE = 0x9E3779B97F4A7C15  # must equal the trial stride inside draw()


def shard_seed(seed: int, trial_offset: int) -> int:
    """Seed whose trial 0 draws equal draw(seed, trial_offset, ...).

    Lets a run be split into trial ranges that each start from 0 locally
    and still reproduce the draws of the single full run.
    """
    return (seed + trial_offset * _TRIAL_STRIDE) & _MASK


def field_arrays(spec: FieldSpec) -> tuple[array, array, array, array]:
    """Exp, log, inverse and negation tables as int64 arrays.

    The compiled kernels take contiguous buffers; the pure ones index
    anything, so this is the one conversion point for both.
    """
    exp, log, inv, neg = spec._tables()
    return array("q", exp), array("q", log), array("q", inv), array("q", neg)
