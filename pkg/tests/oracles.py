"""Independent reference computations used as test oracles.

Everything here is written as plain scalar Python loops straight from the
defining equations, sharing no code with the package's vectorized paths.
"""

import math
import statistics


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def _unpack(kind, hidden, flat):
    gates = {"rnn": 1, "gru": 3, "lstm": 4}[kind]
    gh = gates * hidden
    w_in = list(flat[:gh])
    rec = flat[gh:gh + gh * hidden]
    w_rec = [list(rec[r * hidden:(r + 1) * hidden]) for r in range(gh)]
    b = list(flat[gh + gh * hidden: 2 * gh + gh * hidden])
    w_out = list(flat[2 * gh + gh * hidden: 2 * gh + gh * hidden + hidden])
    return w_in, w_rec, b, w_out, float(flat[-1])


def _pre(w_in, w_rec, b, x, h, row):
    return w_in[row] * x + sum(w_rec[row][j] * h[j] for j in range(len(h))) + b[row]


def reference_forward(kind, hidden, flat, inputs):
    """Scalar-loop forward pass returning the per-step readouts."""
    w_in, w_rec, b, w_out, b_out = _unpack(kind, hidden, [float(v) for v in flat])
    H = hidden
    h = [0.0] * H
    c = [0.0] * H
    ys = []
    for x in inputs:
        if kind == "rnn":
            h = [math.tanh(_pre(w_in, w_rec, b, x, h, i)) for i in range(H)]
        elif kind == "lstm":
            i_g = [sigmoid(_pre(w_in, w_rec, b, x, h, i)) for i in range(H)]
            f_g = [sigmoid(_pre(w_in, w_rec, b, x, h, H + i)) for i in range(H)]
            o_g = [sigmoid(_pre(w_in, w_rec, b, x, h, 2 * H + i)) for i in range(H)]
            g = [math.tanh(_pre(w_in, w_rec, b, x, h, 3 * H + i)) for i in range(H)]
            c = [f_g[i] * c[i] + i_g[i] * g[i] for i in range(H)]
            h = [o_g[i] * math.tanh(c[i]) for i in range(H)]
        else:
            z = [sigmoid(_pre(w_in, w_rec, b, x, h, i)) for i in range(H)]
            r = [sigmoid(_pre(w_in, w_rec, b, x, h, H + i)) for i in range(H)]
            rh = [r[i] * h[i] for i in range(H)]
            n = [math.tanh(_pre(w_in, w_rec, b, x, rh, 2 * H + i)) for i in range(H)]
            h = [(1 - z[i]) * n[i] + z[i] * h[i] for i in range(H)]
        ys.append(sum(w_out[i] * h[i] for i in range(H)) + b_out)
    return ys


def reference_loss(kind, hidden, flat, inputs, targets):
    ys = reference_forward(kind, hidden, flat, inputs)
    return sum((y - t) ** 2 for y, t in zip(ys, targets)) / len(ys)


def finite_difference_gradient(kind, hidden, flat, inputs, targets, step=1e-5):
    flat = [float(v) for v in flat]
    grad = []
    for i in range(len(flat)):
        up = list(flat)
        dn = list(flat)
        up[i] += step
        dn[i] -= step
        grad.append((reference_loss(kind, hidden, up, inputs, targets)
                     - reference_loss(kind, hidden, dn, inputs, targets)) / (2 * step))
    return grad


def gradient_mismatch(analytic, numeric, rel=1e-4, floor=1e-8):
    """Indices where |a-n| exceeds max(rel * max(|a|, |n|), floor)."""
    return [i for i, (a, n) in enumerate(zip(analytic, numeric))
            if abs(a - n) > max(rel * max(abs(a), abs(n)), floor)]


def aare_oracle(actuals, predicted, eps=1e-8):
    total = 0.0
    for a, p in zip(actuals, predicted):
        total += abs(a - p) / max(abs(a), eps)
    return total / 3.0


def threshold_oracle(history, window_w, k=3.0):
    """(mu, sigma, thd) over the last ``window_w`` of the full history, recomputed from scratch."""
    tail = list(history)[-window_w:]
    mu = statistics.fmean(tail)
    sigma = statistics.pstdev(tail)
    return mu, sigma, mu + k * sigma


def match_oracle(labels, detections, k):
    """Exhaustive interval-membership counting."""
    tp = fn = 0
    covered = set()
    for lab in labels:
        lo = lab.start - k
        hi = lab.start + k if lab.kind.value == "POINT" else lab.end
        span = set(range(lo, hi + 1))
        covered |= span
        if any(d in span for d in detections):
            tp += 1
        else:
            fn += 1
    fp = sum(1 for d in detections if d not in covered)
    return tp, fp, fn
