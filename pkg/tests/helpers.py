"""Independent reference computations shared by the tests (scipy expm on plain matrices)."""
import numpy as np


def spin_ops(j):
    """(Jx, Jy, Jz) in the descending-m basis, built from ladder elements."""
    tj = int(round(2 * j))
    m = np.array([(tj - 2 * k) / 2 for k in range(tj + 1)])
    jp = np.zeros((tj + 1, tj + 1))
    for k in range(1, tj + 1):
        # <m+1| J+ |m>, with row k-1 holding m+1
        jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jx = 0.5 * (jp + jp.T)
    jy = -0.5j * (jp - jp.T)
    return jx, jy, np.diag(m)


def rotation_by_expm(j, alpha, beta, gamma):
    from scipy.linalg import expm

    _, jy, jz = spin_ops(j)
    return expm(-1j * alpha * jz) @ expm(-1j * beta * jy) @ expm(-1j * gamma * jz)


def ladder(dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return a, a.T


def displacement_by_expm(beta, keep, pad=60):
    from scipy.linalg import expm

    a, ad = ladder(keep + pad)
    return expm(beta * ad - np.conj(beta) * a)[:keep, :keep]
