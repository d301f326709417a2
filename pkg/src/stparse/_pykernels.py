"""Pure-Python/numpy implementations of the numeric kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or ``STPARSE_PURE_PYTHON`` is set.
"""

import numpy as np

LOSS_LOGISTIC = 0
LOSS_SQUARED_HINGE = 1
REG_L2 = 0
REG_L1 = 1


def viterbi(emit, trans, start, end):
    """Best tag path; among equal-scoring paths, the one that is smallest
    position by position (tag indices are in lexicographic order)."""
    n, T = emit.shape
    path = np.zeros(n, dtype=np.int64)
    if n == 0:
        return path
    beta = np.empty((n, T))
    beta[n - 1] = end
    for i in range(n - 2, -1, -1):
        nxt = emit[i + 1] + beta[i + 1]
        beta[i] = (trans + nxt[None, :]).max(axis=1)
    first = (start + emit[0]) + beta[0]
    path[0] = int(np.argmax(first))
    for i in range(1, n):
        nxt = emit[i] + beta[i]
        cand = trans[path[i - 1]] + nxt
        path[i] = int(np.argmax(cand))
    return path


def _logsumexp(a, axis):
    m = a.max(axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    return np.squeeze(m, axis=axis) + np.log(np.exp(a - m).sum(axis=axis))


def forward_backward(emit, trans, start, end):
    """Log partition, per-position tag marginals, and transition marginals
    summed over positions."""
    n, T = emit.shape
    if n == 0:
        return 0.0, np.zeros((0, T)), np.zeros((T, T))
    alpha = np.empty((n, T))
    beta = np.empty((n, T))
    alpha[0] = start + emit[0]
    for i in range(1, n):
        alpha[i] = _logsumexp(alpha[i - 1][:, None] + trans, axis=0) + emit[i]
    beta[n - 1] = end
    for i in range(n - 2, -1, -1):
        beta[i] = _logsumexp(trans + (emit[i + 1] + beta[i + 1])[None, :], axis=1)
    logz = float(_logsumexp(alpha[n - 1] + end, axis=0))
    marg = np.exp(alpha + beta - logz)
    pair = np.zeros((T, T))
    for i in range(1, n):
        pair += np.exp(alpha[i - 1][:, None] + trans
                       + (emit[i] + beta[i])[None, :] - logz)
    return logz, marg, pair


def log_partition(emit, trans, start, end):
    n, T = emit.shape
    if n == 0:
        return 0.0
    alpha = start + emit[0]
    for i in range(1, n):
        alpha = _logsumexp(alpha[:, None] + trans, axis=0) + emit[i]
    return float(_logsumexp(alpha + end, axis=0))


def _dloss(s, y, loss):
    """Derivative of the binary loss wrt the score; y in {-1, +1}."""
    if loss == LOSS_LOGISTIC:
        # sigmoid(-z) written with tanh to stay finite for large |z|
        return -y * 0.5 * (1.0 - np.tanh(0.5 * y * s))
    m = 1.0 - y * s
    return np.where(m > 0, -2.0 * y * m, 0.0)


def sgd_epoch(W, b, Q, indptr, indices, labels, order, lr, loss,
              multinomial, reg, lam, wscale, u):
    """One pass of per-token SGD, updating W, b, Q in place.

    ``W`` holds weights divided by ``wscale`` (lazy L2 decay).  ``u`` is
    the running total L1 penalty and ``Q`` the penalty already applied
    per weight (cumulative-penalty clipping).  Returns the new
    ``(wscale, u)``.
    """
    T = W.shape[1]
    for idx in order:
        ids = indices[indptr[idx]:indptr[idx + 1]]
        y = labels[idx]
        if reg == REG_L2 and lam > 0.0:
            wscale *= 1.0 - lr * lam
            if wscale < 1e-9:
                W *= wscale
                wscale = 1.0
        s = W[ids].sum(axis=0) * wscale + b
        if multinomial:
            e = np.exp(s - s.max())
            g = e / e.sum()
            g[y] -= 1.0
        else:
            sign = -np.ones(T)
            sign[y] = 1.0
            g = _dloss(s, sign, loss)
        if len(ids):
            W[ids] -= (lr / wscale) * g[None, :]
        b -= lr * g
        if reg == REG_L1 and lam > 0.0:
            u += lr * lam
            if len(ids):
                w = W[ids]
                q = Q[ids]
                new = np.where(w > 0, np.maximum(0.0, w - (u + q)),
                               np.where(w < 0, np.minimum(0.0, w + (u - q)), w))
                Q[ids] = q + (new - w)
                W[ids] = new
    return wscale, u


def data_loss(scores, labels, loss, multinomial):
    """Mean per-token loss given an (N, T) score matrix."""
    N, T = scores.shape
    if N == 0:
        return 0.0
    rows = np.arange(N)
    if multinomial:
        m = scores.max(axis=1)
        lse = m + np.log(np.exp(scores - m[:, None]).sum(axis=1))
        return float((lse - scores[rows, labels]).mean())
    y = -np.ones((N, T))
    y[rows, labels] = 1.0
    z = y * scores
    if loss == LOSS_LOGISTIC:
        per = np.logaddexp(0.0, -z)
    else:
        per = np.maximum(0.0, 1.0 - z) ** 2
    return float(per.sum(axis=1).mean())

