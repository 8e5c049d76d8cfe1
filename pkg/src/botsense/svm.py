"""Binary soft-margin SVM trained by sequential minimal optimization.

The solver works on the dual

    maximize   sum(a) - 1/2 a^T Q a,   Q_ij = y_i y_j K(x_i, x_j)
    subject to 0 <= a_i <= c,  sum(a_i y_i) = 0

updating two multipliers per step. The pair is chosen by second-order
working-set selection (the most violating ``i``, then the ``j`` giving the
largest guaranteed objective gain), and training stops once the maximal KKT
violation drops below ``kkt_tolerance``. Labels are +1 for bot, -1 for human.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOT, HUMAN = "bot", "human"
_TAU = 1e-12


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    kernel: str = "linear"
    gamma: float | None = None  # None -> 1 / n_features
    kkt_tolerance: float = 1e-3
    max_iterations: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.kernel not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def resolved_gamma(self, dim: int) -> float:
        return self.gamma if self.gamma is not None else 1.0 / max(dim, 1)


def kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return a @ b.T
    sq = (
        np.square(a).sum(axis=1)[:, None]
        + np.square(b).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    config: SvmConfig
    gamma: float = 1.0
    fallback: str | None = None

    @property
    def dim(self) -> int:
        return self.support_vectors.shape[1]

    @classmethod
    def constant(cls, label: str, dim: int, config: SvmConfig | None = None) -> "SvmModel":
        if label not in (BOT, HUMAN):
            raise ValueError(f"unknown class {label!r}")
        return cls(np.empty((0, dim)), np.empty(0), 0.0, config or SvmConfig(), 1.0, label)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    objective_trace: list[float] = field(default_factory=list)


def _signed(ys) -> np.ndarray:
    ys = np.asarray(ys)
    if ys.dtype.kind in "US" or ys.dtype == object:
        ys = np.where(ys == BOT, 1.0, np.where(ys == HUMAN, -1.0, np.nan))
    ys = np.asarray(ys, dtype=float)
    if not np.all(np.isin(ys, (-1.0, 1.0))):
        raise ValueError("labels must be +1/-1 or 'bot'/'human'")
    return ys


def solve_smo(
    kernel: np.ndarray,
    y: np.ndarray,
    c: float,
    tol: float = 1e-3,
    max_iterations: int = 1_000_000,
    seed: int = 0,
    track_objective: bool = False,
) -> SmoResult:
    """Solve the SVM dual for a precomputed kernel matrix.

    Returns multipliers for every training point plus the bias. Ties in pair
    selection are broken by a seeded permutation of the indices, so the run
    is a pure function of its inputs.
    """
    y_in = np.asarray(y, dtype=float)
    n = len(y_in)
    # work in a seeded permutation of the points; first-index argmax/argmin
    # in that order is the tie-break
    order = np.random.default_rng(seed).permutation(n)
    y = y_in[order]
    K = np.asarray(kernel, dtype=float)[np.ix_(order, order)]
    diag = np.diag(K).copy()

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a^T Q a - e^T a
    trace = [0.0] if track_objective else []
    iterations = 0
    converged = False

    pos = y > 0
    up = pos.copy()  # may move in the +y direction
    low = ~pos  # may move in the -y direction
    while iterations < max_iterations:
        score = -y * grad
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        g_max = up_scores[i]
        g_min = np.min(np.where(low, score, np.inf))
        if g_max - g_min < tol:
            converged = True
            break

        Ki = K[i]
        # second-order choice of j among I_low members below g_max
        b = g_max - score
        a = diag[i] + diag - 2.0 * Ki
        a = np.where(a > 0, a, _TAU)
        gain = np.where(low & (b > 0), -(b * b) / a, np.inf)
        j = int(np.argmin(gain))

        Kj = K[j]
        alpha_i, alpha_j = alpha[i], alpha[j]
        quad = a[j]
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha_i - alpha_j
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = c - diff
            elif alpha[j] > c:
                alpha[j] = c
                alpha[i] = c + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = alpha_i + alpha_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > c:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = total - c
            elif alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = total
            if total > c:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = total - c
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = total

        d_i = alpha[i] - alpha_i
        d_j = alpha[j] - alpha_j
        grad += y * (Ki * (y[i] * d_i) + Kj * (y[j] * d_j))
        for t in (i, j):
            below, above = alpha[t] < c, alpha[t] > 0
            up[t] = below if pos[t] else above
            low[t] = above if pos[t] else below
        iterations += 1
        if track_objective:
            trace.append(float(0.5 * alpha.sum() - 0.5 * alpha @ grad))

    out_alpha = np.empty(n)
    out_alpha[order] = alpha
    out_grad = np.empty(n)
    out_grad[order] = grad
    bias = _bias(out_alpha, out_grad, y_in, c)
    return SmoResult(out_alpha, bias, iterations, converged, trace)


def _bias(alpha, grad, y, c) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < c)
    if np.any(free):
        rho = float(yg[free].mean())
    else:
        pos = y > 0
        at_upper = alpha >= c
        at_lower = alpha <= 0
        # bounds on rho from the bound multipliers
        ub_mask = np.where(pos, at_lower, at_upper)
        lb_mask = np.where(pos, at_upper, at_lower)
        ub = yg[ub_mask].min() if np.any(ub_mask) else np.inf
        lb = yg[lb_mask].max() if np.any(lb_mask) else -np.inf
        rho = float((ub + lb) / 2) if np.isfinite(ub) and np.isfinite(lb) else float(
            ub if np.isfinite(ub) else lb
        )
    return -rho


def train_svm(xs, ys, cfg: SvmConfig | None = None) -> SvmModel:
    """Train a binary SVM; ``ys`` holds +1 (bot) / -1 (human) or class names."""
    cfg = cfg or SvmConfig()
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise ValueError("xs must be a non-empty 2-d array")
    if not np.all(np.isfinite(xs)):
        raise ValueError("xs contains non-finite values")
    y = _signed(ys)
    if len(y) != xs.shape[0]:
        raise ValueError("xs and ys lengths differ")
    if np.all(y == y[0]):
        raise ValueError("degenerate training set: only one class present")

    gamma = cfg.resolved_gamma(xs.shape[1])
    K = kernel_matrix(xs, xs, cfg.kernel, gamma)
    res = solve_smo(K, y, cfg.c, cfg.kkt_tolerance, cfg.max_iterations, cfg.seed)
    sv = res.alpha > 0
    return SvmModel(
        support_vectors=xs[sv].copy(),
        dual_coefs=res.alpha[sv] * y[sv],
        bias=res.bias,
        config=cfg,
        gamma=gamma,
    )


def decision_values(model: SvmModel, xs) -> np.ndarray:
    if model.fallback is not None:
        raise ValueError("constant model has no margin")
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != model.dim:
        raise ValueError(f"input has {xs.shape[1]} features, model expects {model.dim}")
    K = kernel_matrix(xs, model.support_vectors, model.config.kernel, model.gamma)
    return K @ model.dual_coefs + model.bias


def decision_value(model: SvmModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be a vector")
    return float(decision_values(model, x[None, :])[0])


def predict(model: SvmModel, x) -> str:
    """Class of one input; a decision value of exactly 0 counts as bot."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"input has shape {x.shape}, model expects ({model.dim},)")
    if model.fallback is not None:
        return model.fallback
    return BOT if decision_value(model, x) >= 0 else HUMAN


def predict_many(model: SvmModel, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != model.dim:
        raise ValueError(f"inputs have shape {xs.shape}, model expects (n, {model.dim})")
    if model.fallback is not None:
        return np.full(len(xs), model.fallback, dtype=object)
    return np.where(decision_values(model, xs) >= 0, BOT, HUMAN).astype(object)
