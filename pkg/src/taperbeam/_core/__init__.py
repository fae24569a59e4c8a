"""Numerical kernels: compiled extension when available, numpy otherwise.

Set ``TAPERBEAM_PURE_PYTHON=1`` to force the numpy kernels.
"""

import os

from . import _fallback as fallback

try:
    if os.environ.get("TAPERBEAM_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python kernels requested")
    from . import _kernels as compiled
except ImportError:
    compiled = None

kernels = compiled if compiled is not None else fallback
BACKEND = kernels.NAME

cheb_basis = kernels.cheb_basis
mlp_forward_jet = kernels.mlp_forward_jet
pinn_loss_grad = kernels.pinn_loss_grad

__all__ = ["BACKEND", "cheb_basis", "compiled", "fallback", "kernels", "mlp_forward_jet", "pinn_loss_grad"]
