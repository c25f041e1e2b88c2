"""Numpy prototypes of the transfer (random-feature ridge) and DFA pipelines.

Used to establish the accuracy margins asserted by the acceptance suite.
"""
import numpy as np

rng = np.random.default_rng(7)


def circles(N, lift, noise=0.05, factor=0.5):
    lab = rng.integers(0, 2, N)
    th = rng.uniform(0, 2 * np.pi, N)
    r = np.where(lab == 1, factor, 1.0)
    p = np.stack([r * np.cos(th), r * np.sin(th)], 1) + noise * rng.standard_normal((N, 2))
    W = rng.standard_normal((lift, 2))
    return p @ W.T, lab


def blobs(N, d, sep=3.0):
    lab = rng.integers(0, 2, N)
    c = np.where(lab[:, None] == 1, 1.0, -1.0) * sep / np.sqrt(d)
    return c + rng.standard_normal((N, d)), lab


def ridge_acc(Ftr, ytr, Fte, yte, lam):
    mu, sd = Ftr.mean(0), Ftr.std(0) + 1e-12
    Ftr = np.hstack([(Ftr - mu) / sd, np.ones((len(Ftr), 1))])
    Fte = np.hstack([(Fte - mu) / sd, np.ones((len(Fte), 1))])
    T = np.eye(2)[ytr]
    W = np.linalg.solve(Ftr.T @ Ftr + lam * np.eye(Ftr.shape[1]), Ftr.T @ T)
    return (np.argmax(Ftr @ W, 1) == ytr).mean(), (np.argmax(Fte @ W, 1) == yte).mean()


def opu(B, m):
    n = B.shape[1]
    M = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
    y = np.abs(B @ M.T) ** 2
    mx = y.max(1, keepdims=True)
    scale = np.where(mx > 0, mx / 255, 1.0)
    return np.round(y / scale) * scale


def transfer(X, lab, enc, m, lam=1.0):
    N = len(X); ntr = int(0.7 * N)
    Xtr, Xte, ytr, yte = X[:ntr], X[ntr:], lab[:ntr], lab[ntr:]
    if enc == "median":
        t = np.median(Xtr, 0)
    else:
        t = np.full(X.shape[1], float(enc))
    B = (X >= t).astype(float)
    F = opu(B, m)
    base = ridge_acc(Xtr, ytr, Xte, yte, lam)
    o = ridge_acc(F[:ntr], ytr, F[ntr:], yte, lam)
    return base, o


for lift in (20, 32, 64):
    X, lab = circles(500, lift)
    for enc in ("median", "0.5", "0.25"):
        for m in (2, 1024):
            print("circles lift", lift, enc, m, transfer(X, lab, enc, m))
X, lab = blobs(500, 20)
for m in (2, 1024):
    print("blobs", m, transfer(X, lab, "median", m))


def moons(N, noise=0.1):
    lab = rng.integers(0, 2, N)
    t = rng.uniform(0, np.pi, N)
    p = np.where(lab[:, None] == 0, np.stack([np.cos(t), np.sin(t)], 1),
                 np.stack([1 - np.cos(t), 0.5 - np.sin(t)], 1))
    return p + noise * rng.standard_normal((N, 2)), lab


def dfa(epochs=200, lr=0.01, batch=16, N=400):
    X, lab = moons(N)
    T = np.where(lab == 1, 1.0, -1.0)[:, None]
    dims = [2, 32, 32, 1]
    Ws = [rng.uniform(-1, 1, (dims[i + 1], dims[i])) * np.sqrt(6 / (dims[i] + dims[i + 1])) for i in range(3)]
    bs = [np.zeros(dims[i + 1]) for i in range(3)]
    Bs = [rng.standard_normal((dims[i + 1], 1)) for i in range(2)]
    for ep in range(epochs):
        for s in range(0, N, batch):
            x = X[s:s + batch]; t = T[s:s + batch]
            hs = [x]; acts = []
            for l in range(3):
                a = hs[-1] @ Ws[l].T + bs[l]
                acts.append(a)
                hs.append(np.tanh(a) if l < 2 else a)
            e = hs[-1] - t
            deltas = [None, None, e]
            for l in range(2):
                deltas[l] = (e @ Bs[l].T) * (1 - np.tanh(acts[l]) ** 2)
            for l in range(3):
                Ws[l] -= lr * deltas[l].T @ hs[l] / len(x)
                bs[l] -= lr * deltas[l].mean(0)
        if ep % 50 == 49 or ep == epochs - 1:
            h = X
            for l in range(3):
                a = h @ Ws[l].T + bs[l]
                h = np.tanh(a) if l < 2 else a
            print("dfa epoch", ep + 1, "acc", ((h[:, 0] > 0) == (lab == 1)).mean())


dfa()
dfa(batch=1)
