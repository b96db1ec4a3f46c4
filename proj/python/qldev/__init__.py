"""Quantum Fisher information and large-deviation estimation toolkit."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # in-tree build: extension module sits on sys.path
    from _core import *  # noqa: F401,F403
