"""Pure numpy versions of the hot kernels.

Jets here carry derivatives (not Taylor coefficients): ``a[k]`` is the k-th
derivative with respect to the scalar network input, k = 0..4.
"""

import numpy as np

NAME = "numpy"


def cheb_basis(x, order):
    """T_k(2x-1) and its first four x-derivatives; shape (n, order+1, 5)."""
    x = np.ascontiguousarray(x, dtype=float).reshape(-1)
    n = x.shape[0]
    order = int(order)
    xi = 2.0 * x - 1.0
    # T[d, k, :] is the d-th derivative in the mapped variable
    T = np.zeros((5, order + 1, n))
    T[0, 0] = 1.0
    if order >= 1:
        T[0, 1] = xi
        T[1, 1] = 1.0
    for k in range(1, order):
        T[0, k + 1] = 2.0 * xi * T[0, k] - T[0, k - 1]
        for d in range(1, 5):
            T[d, k + 1] = 2.0 * xi * T[d, k] + 2.0 * d * T[d - 1, k] - T[d, k - 1]
    scale = 2.0 ** np.arange(5)
    return np.ascontiguousarray((T * scale[:, None, None]).transpose(2, 1, 0))


def _layers(params, sizes):
    out = []
    off = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = params[off : off + fan_in * fan_out].reshape(fan_out, fan_in)
        off += fan_in * fan_out
        b = params[off : off + fan_out]
        off += fan_out
        out.append((W, b))
    if off != params.shape[0]:
        raise ValueError(f"parameter vector has length {params.shape[0]}, layer sizes need {off}")
    return out


def _tanh_tower(z0):
    t = np.tanh(z0)
    t2 = t * t
    f1 = 1.0 - t2
    f2 = -2.0 * t * f1
    f3 = f1 * (6.0 * t2 - 2.0)
    f4 = f1 * t * (16.0 - 24.0 * t2)
    f5 = f1 * (16.0 - 120.0 * t2 + 120.0 * t2 * t2)
    return t, f1, f2, f3, f4, f5


def _compose(f, z):
    _, f1, f2, f3, f4, _ = f
    z1, z2, z3, z4 = z[1], z[2], z[3], z[4]
    z1s = z1 * z1
    y = np.empty_like(z)
    y[0] = f[0]
    y[1] = f1 * z1
    y[2] = f2 * z1s + f1 * z2
    y[3] = f3 * z1s * z1 + 3.0 * f2 * z1 * z2 + f1 * z3
    y[4] = f4 * z1s * z1s + 6.0 * f3 * z1s * z2 + f2 * (3.0 * z2 * z2 + 4.0 * z1 * z3) + f1 * z4
    return y


def _compose_backward(f, z, yb):
    _, f1, f2, f3, f4, f5 = f
    z1, z2, z3, z4 = z[1], z[2], z[3], z[4]
    z1s = z1 * z1
    zb = np.empty_like(z)
    zb[4] = yb[4] * f1
    zb[3] = yb[3] * f1 + yb[4] * 4.0 * f2 * z1
    zb[2] = yb[2] * f1 + yb[3] * 3.0 * f2 * z1 + yb[4] * (6.0 * f3 * z1s + 6.0 * f2 * z2)
    zb[1] = (
        yb[1] * f1
        + yb[2] * 2.0 * f2 * z1
        + yb[3] * (3.0 * f3 * z1s + 3.0 * f2 * z2)
        + yb[4] * (4.0 * f4 * z1s * z1 + 12.0 * f3 * z1 * z2 + 4.0 * f2 * z3)
    )
    f1b = yb[1] * z1 + yb[2] * z2 + yb[3] * z3 + yb[4] * z4
    f2b = yb[2] * z1s + yb[3] * 3.0 * z1 * z2 + yb[4] * (3.0 * z2 * z2 + 4.0 * z1 * z3)
    f3b = yb[3] * z1s * z1 + yb[4] * 6.0 * z1s * z2
    f4b = yb[4] * z1s * z1s
    zb[0] = yb[0] * f1 + f1b * f2 + f2b * f3 + f3b * f4 + f4b * f5
    return zb


def _forward(params, sizes, x):
    layers = _layers(params, sizes)
    a = np.zeros((5, 1, x.shape[0]))
    a[0, 0] = x
    a[1, 0] = 1.0
    tape = []
    for i, (W, b) in enumerate(layers):
        z = np.einsum("oi,kin->kon", W, a)
        z[0] += b[:, None]
        if i == len(layers) - 1:
            tape.append((a, None, z))
            return z[:, 0, :], layers, tape
        f = _tanh_tower(z[0])
        tape.append((a, f, z))
        a = _compose(f, z)


def mlp_forward_jet(params, sizes, x):
    """Network output and its first four input derivatives; shape (5, n)."""
    params = np.ascontiguousarray(params, dtype=float)
    x = np.ascontiguousarray(x, dtype=float).reshape(-1)
    u, _, _ = _forward(params, tuple(int(s) for s in sizes), x)
    return u


def pinn_loss_grad(params, sizes, x, c2, c3, c4, rhs, probe_x, probe_order, probe_weight):
    """Mean squared residual plus weighted squared boundary probes, with its gradient.

    The residual at collocation point i is
    ``c2[i]*u''(x_i) + c3[i]*u'''(x_i) + c4[i]*u''''(x_i) - rhs[i]``; each
    probe j adds ``probe_weight[j] * u^(probe_order[j])(probe_x[j])**2``.
    """
    params = np.ascontiguousarray(params, dtype=float)
    sizes = tuple(int(s) for s in sizes)
    x = np.ascontiguousarray(x, dtype=float).reshape(-1)
    probe_x = np.ascontiguousarray(probe_x, dtype=float).reshape(-1)
    probe_order = np.asarray(probe_order, dtype=np.intp).reshape(-1)
    probe_weight = np.asarray(probe_weight, dtype=float).reshape(-1)
    n = x.shape[0]
    m = probe_x.shape[0]

    u, layers, tape = _forward(params, sizes, np.concatenate([x, probe_x]))
    r = c2 * u[2, :n] + c3 * u[3, :n] + c4 * u[4, :n] - rhs
    pv = u[probe_order, n + np.arange(m)]
    loss = float(np.dot(r, r) / n + np.dot(probe_weight, pv * pv))

    ub = np.zeros_like(u)
    s = 2.0 * r / n
    ub[2, :n] = s * c2
    ub[3, :n] = s * c3
    ub[4, :n] = s * c4
    ub[probe_order, n + np.arange(m)] += 2.0 * probe_weight * pv

    grads = []
    zb = ub[:, None, :]
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        a, _, _ = tape[i]
        gW = np.einsum("kon,kin->oi", zb, a)
        gb = zb[0].sum(axis=1)
        grads.append(np.concatenate([gW.ravel(), gb]))
        if i == 0:
            break
        ab = np.einsum("oi,kon->kin", W, zb)
        _, f, z = tape[i - 1]
        zb = _compose_backward(f, z, ab)
    return loss, np.concatenate(grads[::-1])
