"""Kernel selection: the compiled extension when built, else pure Python.

Set ``INTERVALQS_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _kernels_py

HAVE_COMPILED = False
_impl = _kernels_py
if not os.environ.get("INTERVALQS_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if HAVE_COMPILED else "python"


def backend_module(name=None):
    """The kernel module by name ('compiled' or 'python'); default is the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def kernel_map(fmap, backend=None):
    """Flatten a MultimodalMap into the kernel representation."""
    mod = backend_module(backend)
    impl = fmap._impl
    crit = [cp.location for cp in fmap.critical_points]
    incr = np.asarray(fmap.lap_increasing, dtype=bool)
    if impl.kind == "affine":
        return mod.KernelMap(0, fmap.lap_ends, fmap.lap_values, incr, crit, impl.p, impl.s, impl.v, [])
    kind = 1 if len(impl.c) == 3 else 2
    return mod.KernelMap(kind, fmap.lap_ends, fmap.lap_values, incr, crit, [], [], [], impl.c)


def criticality_table(fmap, xs, n_max, r, crit, backend=None):
    mod = backend_module(backend)
    return mod.criticality_table(kernel_map(fmap, backend), xs, int(n_max), float(r), list(crit))


def chain(fmap, orbit, m, lo, hi, backend=None):
    """Pull (lo, hi) back along the orbit; see ``_kernels_py.chain``."""
    mod = backend_module(backend)
    return mod.chain(kernel_map(fmap, backend), [float(v) for v in orbit], int(m), float(lo), float(hi))


def orbit(fmap, x, n, backend=None):
    mod = backend_module(backend)
    return mod.orbit(kernel_map(fmap, backend), float(x), int(n))
