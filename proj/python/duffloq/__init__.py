"""Driven Duffing oscillator toolkit: classical averaging, rotating-frame
expansions in the system- and pump-photon bases, and open-system scans."""

try:
    from ._core import *  # noqa: F401,F403  (installed layout)
except ImportError:  # in-tree build: extension sits on sys.path directly
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
