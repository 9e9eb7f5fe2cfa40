"""Independent slow-path oracles used to cross-check the production code.

Kept free of the implementation routes they validate: hull membership is
decided by LP feasibility over the explicit orbit, SL(2) projections by the
closed form of the top minor.
"""

import numpy as np
from scipy.optimize import linprog

from crown import weyl_orbit


def lp_hull_membership(ctx, x, y, tol=1e-9):
    """Feasibility of y = sum_w c_w (w.x), c >= 0, sum c = 1 over the explicit orbit."""
    orbit = weyl_orbit(ctx, x)
    count = orbit.shape[0]
    a_eq = np.vstack([orbit.T, np.ones(count)])
    b_eq = np.concatenate([np.asarray(y, dtype=float), [1.0]])
    res = linprog(np.zeros(count), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0.0, None)] * count, method="highs")
    if res.status == 0:
        return True
    # retry with slack to separate genuine infeasibility from the tolerance band
    res = linprog(np.zeros(count), A_ub=np.vstack([a_eq, -a_eq]),
                  b_ub=np.concatenate([b_eq + tol, tol - b_eq]),
                  bounds=[(0.0, None)] * count, method="highs")
    return res.status == 0


def sl2_rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def sl2_top_ratio_complex(theta, t):
    """(z z^T)_11 for z = rotation(theta) exp(i t H), H = diag(1, -1)."""
    return np.cos(2 * t) + 1j * np.sin(2 * t) * np.cos(2 * theta)


def sl2_im_log_a(theta, t):
    """Imaginary part of log a_1 on the principal branch (valid for |t| < pi/4)."""
    return 0.5 * np.angle(sl2_top_ratio_complex(theta, t))


def sl2_real_log_a(theta, s):
    """log a_1 of rotation(theta) exp(s H)."""
    return 0.5 * np.log(np.cosh(2 * s) + np.sinh(2 * s) * np.cos(2 * theta))
