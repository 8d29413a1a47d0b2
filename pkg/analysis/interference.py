#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Cross-user coupling and constructive-interference classification.
"""

import logging

import numpy as np

from errors import ParameterError
from signals.constellation import ANGLE_TOL, wrap_angle

logger = logging.getLogger(__name__)

CONSTRUCTIVE = "constructive"
DESTRUCTIVE = "destructive"
NO_INTERFERENCE = "none"

# |rho| at or below this is treated as no coupling at all
COUPLING_FLOOR = 1e-15


def coupling(h_j, w_k):
    """
    Normalized coupling of precoder ``w_k`` into the channel of user j.

    Args:
        h_j (array-like): Channel row of user j
        w_k (array-like): Precoding column of user k

    Returns:
        complex: rho_jk = (h_j . w_k) / (|h_j| |w_k|), modulus at most 1

    Raises:
        ParameterError: If either vector is zero
    """
    h_j = np.asarray(h_j, dtype=complex).reshape(-1)
    w_k = np.asarray(w_k, dtype=complex).reshape(-1)
    if h_j.shape != w_k.shape:
        raise ParameterError(f"h_j has {h_j.size} entries but w_k has {w_k.size}")
    norm_h = np.linalg.norm(h_j)
    norm_w = np.linalg.norm(w_k)
    if norm_h == 0 or norm_w == 0:
        raise ParameterError("coupling is undefined for a zero vector")
    return complex(np.dot(h_j, w_k) / (norm_h * norm_w))


def coupling_matrix(H, W):
    """K x K matrix of couplings rho_jk between the rows of H and the columns of W."""
    H = np.asarray(H, dtype=complex)
    W = np.asarray(W, dtype=complex)
    row_norms = np.linalg.norm(H, axis=1)
    col_norms = np.linalg.norm(W, axis=0)
    if np.any(row_norms == 0) or np.any(col_norms == 0):
        raise ParameterError("coupling is undefined for a zero vector")
    return (H @ W) / np.outer(row_norms, col_norms)


def matched_filter_precoders(H):
    """
    Matched-filter precoders W = H' with columns h_j^H / |h_j|.

    Args:
        H (array-like): K x M channel

    Returns:
        numpy.ndarray: M x K precoding matrix
    """
    H = np.asarray(H, dtype=complex)
    norms = np.linalg.norm(H, axis=1)
    if np.any(norms == 0):
        raise ParameterError("matched filter is undefined for a zero channel row")
    return H.conj().T / norms


def _signs_agree(reference, value, tol):
    for ref_part, val_part in ((reference.real, value.real), (reference.imag, value.imag)):
        # A zero component of the reference symbol imposes no sign condition
        if abs(ref_part) <= tol:
            continue
        if ref_part * val_part <= tol:
            return False
    return True


def interference_class(d_j, d_k, rho_jk, order, tol=ANGLE_TOL):
    """
    Classify the interference user k's symbol causes at user j.

    The interfering term rho_jk * d_k is constructive when it lies strictly
    inside the detection sector of d_j and its real and imaginary parts carry
    the signs of d_j's. Boundary cases are not constructive.

    Args:
        d_j (complex): Symbol intended for user j
        d_k (complex): Symbol intended for user k
        rho_jk (complex): Coupling coefficient
        order (int): PSK order M
        tol (float): Tolerance on the strict inequalities

    Returns:
        str: ``"constructive"``, ``"destructive"`` or ``"none"`` for zero coupling
    """
    if order < 2:
        raise ParameterError(f"PSK order must be >= 2, got {order}")
    if abs(rho_jk) <= COUPLING_FLOOR:
        return NO_INTERFERENCE

    interferer = complex(rho_jk) * complex(d_k)
    offset = abs(wrap_angle(np.angle(interferer) - np.angle(d_j)))
    in_sector = offset < np.pi / order - tol
    if in_sector and _signs_agree(complex(d_j), interferer, tol):
        return CONSTRUCTIVE
    return DESTRUCTIVE


def is_constructive(d_j, d_k, rho_jk, order, tol=ANGLE_TOL):
    """True iff the interference from user k is constructive at user j."""
    label = interference_class(d_j, d_k, rho_jk, order, tol)
    if label == NO_INTERFERENCE:
        logger.debug(f"Zero coupling between symbols {d_j} and {d_k}; nothing to exploit")
    return label == CONSTRUCTIVE


def mutuality_check(d_j, d_k, rho_jk, rho_kj, order):
    """
    Check that constructiveness is symmetric between users j and k.

    Returns:
        bool: True iff both directions receive the same classification
    """
    return is_constructive(d_j, d_k, rho_jk, order) == is_constructive(d_k, d_j, rho_kj, order)


def constructive_pairs(H, frame, W=None):
    """
    Pairwise classification for a whole symbol frame.

    Args:
        H (array-like): K x M channel
        frame (SymbolFrame): Symbols of the K users
        W (array-like, optional): Precoders; matched filters by default

    Returns:
        numpy.ndarray: K x K boolean matrix, entry (j, k) for interference from k at j
    """
    W = matched_filter_precoders(H) if W is None else np.asarray(W, dtype=complex)
    rho = coupling_matrix(H, W)
    symbols = frame.symbols
    order = frame.constellation.order
    n_users = len(frame)
    result = np.zeros((n_users, n_users), dtype=bool)
    for j in range(n_users):
        for k in range(n_users):
            if j != k:
                result[j, k] = is_constructive(symbols[j], symbols[k], rho[j, k], order)
    return result
