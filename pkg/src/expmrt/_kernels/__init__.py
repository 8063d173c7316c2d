"""Hot-kernel dispatch: compiled extension if built, numpy fallback otherwise.

Set ``EXPMRT_PURE_PYTHON=1`` before import to force the fallback (used by the
kernel benchmark and by tests that compare the two paths).
"""

import os

if os.environ.get("EXPMRT_PURE_PYTHON"):
    from . import _fallback as _impl

    HAVE_COMPILED = False
else:
    try:
        from . import _compiled as _impl  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        from . import _fallback as _impl

        HAVE_COMPILED = False

mgs_sweep = _impl.mgs_sweep
residual_march = _impl.residual_march

__all__ = ["mgs_sweep", "residual_march", "HAVE_COMPILED"]
