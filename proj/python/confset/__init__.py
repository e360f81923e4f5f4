"""Set-valued multiclass classification with expected-size control."""

try:
    from ._confset import *  # noqa: F401,F403
    from ._confset import __doc__  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout puts the module top-level
    from _confset import *  # noqa: F401,F403
    from _confset import __doc__  # noqa: F401
