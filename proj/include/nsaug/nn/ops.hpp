#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "nsaug/nn/graph.hpp"

namespace nsaug::nn {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapM = Eigen::Map<const MatRM<T>>;

template <typename T>
bool needs_grad(const NodeP<T>& n) {
    return n->requires_grad || !n->parents.empty();
}

// ---------------------------------------------------------------------------
// conv2d: x (N,Cin,H,W) * w (Cout,Cin,kh,kw) + b (Cout) -> (N,Cout,Ho,Wo).
// im2col + GEMM; the unrolled columns are cached for the backward pass.

template <typename T>
struct Im2colCache {
    std::vector<T> cols;  // N x (Cin*kh*kw) x (Ho*Wo)
    int64_t per_sample = 0;
};

template <typename T>
void im2col_sample(const T* x, int cin, int h, int w, int kh, int kw, int stride, int pad,
                   int ho, int wo, T* cols) {
    int64_t col_w = static_cast<int64_t>(ho) * wo;
    for (int ci = 0; ci < cin; ++ci) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                T* row = cols + (static_cast<int64_t>(ci) * kh * kw + ky * kw + kx) * col_w;
                for (int oy = 0; oy < ho; ++oy) {
                    int iy = oy * stride + ky - pad;
                    const T* xr = x + (static_cast<int64_t>(ci) * h + iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        int ix = ox * stride + kx - pad;
                        bool ok = iy >= 0 && iy < h && ix >= 0 && ix < w;
                        row[static_cast<int64_t>(oy) * wo + ox] = ok ? xr[ix] : T(0);
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im_sample(const T* cols, int cin, int h, int w, int kh, int kw, int stride, int pad,
                   int ho, int wo, T* dx) {
    int64_t col_w = static_cast<int64_t>(ho) * wo;
    for (int ci = 0; ci < cin; ++ci) {
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                const T* row = cols + (static_cast<int64_t>(ci) * kh * kw + ky * kw + kx) * col_w;
                for (int oy = 0; oy < ho; ++oy) {
                    int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= h) continue;
                    T* xr = dx + (static_cast<int64_t>(ci) * h + iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        int ix = ox * stride + kx - pad;
                        if (ix >= 0 && ix < w) xr[ix] += row[static_cast<int64_t>(oy) * wo + ox];
                    }
                }
            }
        }
    }
}

template <typename T>
NodeP<T> conv2d(const NodeP<T>& x, const NodeP<T>& w, const NodeP<T>& b, int stride, int pad) {
    const auto& xs = x->value.shape;
    const auto& ws = w->value.shape;
    if (xs.size() != 4 || ws.size() != 4) throw ValidationError("conv2d: rank mismatch");
    int n = xs[0], cin = xs[1], h = xs[2], wd = xs[3];
    int cout = ws[0], kh = ws[2], kw = ws[3];
    if (ws[1] != cin) throw ValidationError("conv2d: channel mismatch");
    if (b->value.shape != std::vector<int>{cout}) throw ValidationError("conv2d: bias shape");
    int ho = (h + 2 * pad - kh) / stride + 1;
    int wo = (wd + 2 * pad - kw) / stride + 1;
    if (ho <= 0 || wo <= 0) throw ValidationError("conv2d: empty output");

    const int64_t rows = static_cast<int64_t>(cin) * kh * kw;
    const int64_t cols_w = static_cast<int64_t>(ho) * wo;
    auto cache = std::make_shared<Im2colCache<T>>();
    cache->per_sample = rows * cols_w;
    cache->cols.resize(static_cast<size_t>(n) * cache->per_sample);

    auto out = make_leaf(Tensor<T>({n, cout, ho, wo}));
    CMapM<T> wm(w->value.ptr(), cout, rows);
    for (int i = 0; i < n; ++i) {
        T* cols = cache->cols.data() + i * cache->per_sample;
        im2col_sample(x->value.ptr() + static_cast<int64_t>(i) * cin * h * wd, cin, h, wd, kh,
                      kw, stride, pad, ho, wo, cols);
        MapM<T> om(out->value.ptr() + static_cast<int64_t>(i) * cout * cols_w, cout, cols_w);
        CMapM<T> cm(cols, rows, cols_w);
        om.noalias() = wm * cm;
        for (int co = 0; co < cout; ++co) om.row(co).array() += b->value.data[co];
    }

    out->parents = {x, w, b};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    Node<T>* wp = w.get();
    Node<T>* bp = b.get();
    bool x_needs = needs_grad(x);
    out->backward_fn = [o, xp, wp, bp, cache, x_needs, n, cin, h, wd, cout, kh, kw, stride,
                        pad, ho, wo, rows, cols_w]() {
        CMapM<T> wm(wp->value.ptr(), cout, rows);
        std::vector<T> dcols;
        if (x_needs) dcols.resize(static_cast<size_t>(rows) * cols_w);
        for (int i = 0; i < n; ++i) {
            CMapM<T> dym(o->grad.ptr() + static_cast<int64_t>(i) * cout * cols_w, cout, cols_w);
            const T* cols = cache->cols.data() + i * cache->per_sample;
            CMapM<T> cm(cols, rows, cols_w);
            MapM<T> dwm(wp->grad.ptr(), cout, rows);
            dwm.noalias() += dym * cm.transpose();
            // summed in index order: vectorized reductions round differently
            // depending on buffer alignment, which breaks run-to-run identity
            for (int co = 0; co < cout; ++co) {
                T acc = T(0);
                for (int q = 0; q < cols_w; ++q) acc += dym(co, q);
                bp->grad.data[co] += acc;
            }
            if (x_needs) {
                MapM<T> dcm(dcols.data(), rows, cols_w);
                dcm.noalias() = wm.transpose() * dym;
                col2im_sample(dcols.data(), cin, h, wd, kh, kw, stride, pad, ho, wo,
                              xp->grad.ptr() + static_cast<int64_t>(i) * cin * h * wd);
            }
        }
    };
    return out;
}

// ---------------------------------------------------------------------------
// instance norm over the spatial dims of every (n, c) slice

template <typename T>
NodeP<T> instance_norm(const NodeP<T>& x, const NodeP<T>& gamma, const NodeP<T>& beta,
                       T eps = T(1e-5)) {
    const auto& xs = x->value.shape;
    if (xs.size() != 4) throw ValidationError("instance_norm: rank mismatch");
    int n = xs[0], c = xs[1], h = xs[2], w = xs[3];
    if (gamma->value.shape != std::vector<int>{c} || beta->value.shape != std::vector<int>{c})
        throw ValidationError("instance_norm: affine shape");
    const int64_t m = static_cast<int64_t>(h) * w;

    auto out = make_leaf(Tensor<T>(xs));
    auto xhat = std::make_shared<std::vector<T>>(x->value.data.size());
    auto invstd = std::make_shared<std::vector<T>>(static_cast<size_t>(n) * c);
    for (int i = 0; i < n; ++i) {
        for (int ch = 0; ch < c; ++ch) {
            const T* xp = x->value.ptr() + (static_cast<int64_t>(i) * c + ch) * m;
            T mean = 0;
            for (int64_t k = 0; k < m; ++k) mean += xp[k];
            mean /= static_cast<T>(m);
            T var = 0;
            for (int64_t k = 0; k < m; ++k) var += (xp[k] - mean) * (xp[k] - mean);
            var /= static_cast<T>(m);
            T is = T(1) / std::sqrt(var + eps);
            (*invstd)[static_cast<size_t>(i) * c + ch] = is;
            T* xh = xhat->data() + (static_cast<int64_t>(i) * c + ch) * m;
            T* op = out->value.ptr() + (static_cast<int64_t>(i) * c + ch) * m;
            T g = gamma->value.data[ch], be = beta->value.data[ch];
            for (int64_t k = 0; k < m; ++k) {
                xh[k] = (xp[k] - mean) * is;
                op[k] = g * xh[k] + be;
            }
        }
    }

    out->parents = {x, gamma, beta};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    Node<T>* gp = gamma.get();
    Node<T>* bp = beta.get();
    out->backward_fn = [o, xp, gp, bp, xhat, invstd, n, c, m]() {
        for (int i = 0; i < n; ++i) {
            for (int ch = 0; ch < c; ++ch) {
                const T* dy = o->grad.ptr() + (static_cast<int64_t>(i) * c + ch) * m;
                const T* xh = xhat->data() + (static_cast<int64_t>(i) * c + ch) * m;
                T* dx = xp->grad.ptr() + (static_cast<int64_t>(i) * c + ch) * m;
                T g = gp->value.data[ch];
                T is = (*invstd)[static_cast<size_t>(i) * c + ch];
                T sum_dy = 0, sum_dy_xh = 0;
                for (int64_t k = 0; k < m; ++k) {
                    sum_dy += dy[k];
                    sum_dy_xh += dy[k] * xh[k];
                }
                gp->grad.data[ch] += sum_dy_xh;
                bp->grad.data[ch] += sum_dy;
                T inv_m = T(1) / static_cast<T>(m);
                for (int64_t k = 0; k < m; ++k) {
                    dx[k] += g * is * (dy[k] - inv_m * sum_dy - xh[k] * inv_m * sum_dy_xh);
                }
            }
        }
    };
    return out;
}

// ---------------------------------------------------------------------------
// pointwise activations

template <typename T>
NodeP<T> leaky_relu(const NodeP<T>& x, T alpha = T(0.2)) {
    auto out = make_leaf(Tensor<T>(x->value.shape));
    for (size_t i = 0; i < x->value.data.size(); ++i) {
        T v = x->value.data[i];
        out->value.data[i] = v > T(0) ? v : alpha * v;
    }
    out->parents = {x};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    out->backward_fn = [o, xp, alpha]() {
        for (size_t i = 0; i < xp->grad.data.size(); ++i) {
            xp->grad.data[i] += o->grad.data[i] * (xp->value.data[i] > T(0) ? T(1) : alpha);
        }
    };
    return out;
}

// (tanh(x) + 1) / 2, bounded to (0,1)
template <typename T>
NodeP<T> tanh01(const NodeP<T>& x) {
    auto out = make_leaf(Tensor<T>(x->value.shape));
    for (size_t i = 0; i < x->value.data.size(); ++i)
        out->value.data[i] = (std::tanh(x->value.data[i]) + T(1)) / T(2);
    out->parents = {x};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    out->backward_fn = [o, xp]() {
        for (size_t i = 0; i < xp->grad.data.size(); ++i) {
            T t = T(2) * o->value.data[i] - T(1);
            xp->grad.data[i] += o->grad.data[i] * (T(1) - t * t) / T(2);
        }
    };
    return out;
}

// ---------------------------------------------------------------------------
// shape movers

template <typename T>
NodeP<T> upsample_nearest2(const NodeP<T>& x) {
    const auto& xs = x->value.shape;
    if (xs.size() != 4) throw ValidationError("upsample: rank mismatch");
    int n = xs[0], c = xs[1], h = xs[2], w = xs[3];
    auto out = make_leaf(Tensor<T>({n, c, h * 2, w * 2}));
    for (int i = 0; i < n * c; ++i) {
        const T* src = x->value.ptr() + static_cast<int64_t>(i) * h * w;
        T* dst = out->value.ptr() + static_cast<int64_t>(i) * h * w * 4;
        for (int y = 0; y < 2 * h; ++y)
            for (int xx = 0; xx < 2 * w; ++xx)
                dst[static_cast<int64_t>(y) * 2 * w + xx] = src[static_cast<int64_t>(y / 2) * w + xx / 2];
    }
    out->parents = {x};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    out->backward_fn = [o, xp, n, c, h, w]() {
        for (int i = 0; i < n * c; ++i) {
            const T* dy = o->grad.ptr() + static_cast<int64_t>(i) * h * w * 4;
            T* dx = xp->grad.ptr() + static_cast<int64_t>(i) * h * w;
            for (int y = 0; y < 2 * h; ++y)
                for (int xx = 0; xx < 2 * w; ++xx)
                    dx[static_cast<int64_t>(y / 2) * w + xx / 2] +=
                        dy[static_cast<int64_t>(y) * 2 * w + xx];
        }
    };
    return out;
}

template <typename T>
NodeP<T> global_avg_pool(const NodeP<T>& x) {
    const auto& xs = x->value.shape;
    if (xs.size() != 4) throw ValidationError("gap: rank mismatch");
    int n = xs[0], c = xs[1];
    int64_t m = static_cast<int64_t>(xs[2]) * xs[3];
    auto out = make_leaf(Tensor<T>({n, c}));
    for (int i = 0; i < n * c; ++i) {
        const T* src = x->value.ptr() + i * m;
        T s = 0;
        for (int64_t k = 0; k < m; ++k) s += src[k];
        out->value.data[i] = s / static_cast<T>(m);
    }
    out->parents = {x};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    out->backward_fn = [o, xp, n, c, m]() {
        for (int i = 0; i < n * c; ++i) {
            T g = o->grad.data[i] / static_cast<T>(m);
            T* dx = xp->grad.ptr() + i * m;
            for (int64_t k = 0; k < m; ++k) dx[k] += g;
        }
    };
    return out;
}

template <typename T>
NodeP<T> linear(const NodeP<T>& x, const NodeP<T>& w, const NodeP<T>& b) {
    const auto& xs = x->value.shape;
    const auto& ws = w->value.shape;
    if (xs.size() != 2 || ws.size() != 2 || ws[1] != xs[1])
        throw ValidationError("linear: shape mismatch");
    int n = xs[0], din = xs[1], dout = ws[0];
    if (b->value.shape != std::vector<int>{dout}) throw ValidationError("linear: bias shape");
    auto out = make_leaf(Tensor<T>({n, dout}));
    CMapM<T> xm(x->value.ptr(), n, din), wm(w->value.ptr(), dout, din);
    MapM<T> om(out->value.ptr(), n, dout);
    om.noalias() = xm * wm.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dout; ++j) om(i, j) += b->value.data[j];

    out->parents = {x, w, b};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    Node<T>* wp = w.get();
    Node<T>* bp = b.get();
    bool x_needs = needs_grad(x);
    out->backward_fn = [o, xp, wp, bp, x_needs, n, din, dout]() {
        CMapM<T> dym(o->grad.ptr(), n, dout);
        CMapM<T> xm(xp->value.ptr(), n, din), wm(wp->value.ptr(), dout, din);
        MapM<T> dwm(wp->grad.ptr(), dout, din);
        dwm.noalias() += dym.transpose() * xm;
        // summed in index order for run-to-run identity (see conv2d note)
        for (int j = 0; j < dout; ++j) {
            T acc = T(0);
            for (int i = 0; i < n; ++i) acc += dym(i, j);
            bp->grad.data[j] += acc;
        }
        if (x_needs) {
            MapM<T> dxm(xp->grad.ptr(), n, din);
            dxm.noalias() += dym * wm;
        }
    };
    return out;
}

template <typename T>
NodeP<T> concat_channels(const std::vector<NodeP<T>>& xs) {
    if (xs.empty()) throw ValidationError("concat: empty");
    int n = xs[0]->value.shape[0], h = xs[0]->value.shape[2], w = xs[0]->value.shape[3];
    int ctot = 0;
    for (const auto& x : xs) {
        const auto& s = x->value.shape;
        if (s.size() != 4 || s[0] != n || s[2] != h || s[3] != w)
            throw ValidationError("concat: shape mismatch");
        ctot += s[1];
    }
    auto out = make_leaf(Tensor<T>({n, ctot, h, w}));
    int64_t m = static_cast<int64_t>(h) * w;
    for (int i = 0; i < n; ++i) {
        int64_t off = 0;
        for (const auto& x : xs) {
            int c = x->value.shape[1];
            std::copy_n(x->value.ptr() + static_cast<int64_t>(i) * c * m, c * m,
                        out->value.ptr() + (static_cast<int64_t>(i) * ctot + off) * m);
            off += c;
        }
    }
    out->parents = xs;
    Node<T>* o = out.get();
    std::vector<Node<T>*> ps;
    for (const auto& x : xs) ps.push_back(x.get());
    out->backward_fn = [o, ps, n, ctot, m]() {
        for (int i = 0; i < n; ++i) {
            int64_t off = 0;
            for (Node<T>* p : ps) {
                int c = p->value.shape[1];
                const T* src = o->grad.ptr() + (static_cast<int64_t>(i) * ctot + off) * m;
                T* dst = p->grad.ptr() + static_cast<int64_t>(i) * c * m;
                for (int64_t k = 0; k < c * m; ++k) dst[k] += src[k];
                off += c;
            }
        }
    };
    return out;
}

// (N,D) -> (N,D,H,W) constant planes
template <typename T>
NodeP<T> broadcast_planes(const NodeP<T>& v, int h, int w) {
    const auto& vs = v->value.shape;
    if (vs.size() != 2) throw ValidationError("broadcast: rank mismatch");
    int n = vs[0], d = vs[1];
    auto out = make_leaf(Tensor<T>({n, d, h, w}));
    int64_t m = static_cast<int64_t>(h) * w;
    for (int i = 0; i < n * d; ++i) {
        T val = v->value.data[i];
        T* dst = out->value.ptr() + i * m;
        for (int64_t k = 0; k < m; ++k) dst[k] = val;
    }
    out->parents = {v};
    Node<T>* o = out.get();
    Node<T>* vp = v.get();
    out->backward_fn = [o, vp, n, d, m]() {
        for (int i = 0; i < n * d; ++i) {
            const T* src = o->grad.ptr() + i * m;
            T s = 0;
            for (int64_t k = 0; k < m; ++k) s += src[k];
            vp->grad.data[i] += s;
        }
    };
    return out;
}

template <typename T>
NodeP<T> add(const NodeP<T>& a, const NodeP<T>& b) {
    if (!a->value.same_shape(b->value)) throw ValidationError("add: shape mismatch");
    auto out = make_leaf(Tensor<T>(a->value.shape));
    for (size_t i = 0; i < a->value.data.size(); ++i)
        out->value.data[i] = a->value.data[i] + b->value.data[i];
    out->parents = {a, b};
    Node<T>* o = out.get();
    Node<T>* ap = a.get();
    Node<T>* bp = b.get();
    out->backward_fn = [o, ap, bp]() {
        for (size_t i = 0; i < o->grad.data.size(); ++i) {
            ap->grad.data[i] += o->grad.data[i];
            bp->grad.data[i] += o->grad.data[i];
        }
    };
    return out;
}

// fresh leaf holding a copy of the value; gradients stop here
template <typename T>
NodeP<T> detach(const NodeP<T>& x) {
    return make_leaf(Tensor<T>(x->value.shape, x->value.data));
}

// ---------------------------------------------------------------------------
// losses (scalar outputs, mean-reduced)

template <typename T>
NodeP<T> l1_loss(const NodeP<T>& a, const NodeP<T>& b) {
    if (!a->value.same_shape(b->value)) throw ValidationError("l1: shape mismatch");
    auto out = make_leaf(Tensor<T>({1}));
    T s = 0;
    for (size_t i = 0; i < a->value.data.size(); ++i)
        s += std::abs(a->value.data[i] - b->value.data[i]);
    T inv = T(1) / static_cast<T>(a->value.data.size());
    out->value.data[0] = s * inv;
    out->parents = {a, b};
    Node<T>* o = out.get();
    Node<T>* ap = a.get();
    Node<T>* bp = b.get();
    out->backward_fn = [o, ap, bp, inv]() {
        T g = o->grad.data[0] * inv;
        for (size_t i = 0; i < ap->value.data.size(); ++i) {
            T d = ap->value.data[i] - bp->value.data[i];
            T sg = d > T(0) ? g : (d < T(0) ? -g : T(0));
            ap->grad.data[i] += sg;
            bp->grad.data[i] -= sg;
        }
    };
    return out;
}

template <typename T>
NodeP<T> mse_to_const(const NodeP<T>& x, T target) {
    auto out = make_leaf(Tensor<T>({1}));
    T s = 0;
    for (T v : x->value.data) s += (v - target) * (v - target);
    T inv = T(1) / static_cast<T>(x->value.data.size());
    out->value.data[0] = s * inv;
    out->parents = {x};
    Node<T>* o = out.get();
    Node<T>* xp = x.get();
    out->backward_fn = [o, xp, target, inv]() {
        T g = o->grad.data[0] * inv * T(2);
        for (size_t i = 0; i < xp->value.data.size(); ++i)
            xp->grad.data[i] += g * (xp->value.data[i] - target);
    };
    return out;
}

namespace detail {
template <typename T>
void softmax_rows(const T* logits, int n, int k, T* out) {
    for (int i = 0; i < n; ++i) {
        const T* row = logits + static_cast<int64_t>(i) * k;
        T* orow = out + static_cast<int64_t>(i) * k;
        T mx = row[0];
        for (int j = 1; j < k; ++j) mx = std::max(mx, row[j]);
        T z = 0;
        for (int j = 0; j < k; ++j) {
            orow[j] = std::exp(row[j] - mx);
            z += orow[j];
        }
        for (int j = 0; j < k; ++j) orow[j] /= z;
    }
}
}  // namespace detail

// mean over rows of cross-entropy against integer labels
template <typename T>
NodeP<T> softmax_ce_labels(const NodeP<T>& logits, const std::vector<int>& labels) {
    const auto& s = logits->value.shape;
    if (s.size() != 2 || static_cast<size_t>(s[0]) != labels.size())
        throw ValidationError("ce: shape mismatch");
    int n = s[0], k = s[1];
    for (int l : labels)
        if (l < 0 || l >= k) throw ValidationError("ce: label out of range");
    auto probs = std::make_shared<std::vector<T>>(static_cast<size_t>(n) * k);
    detail::softmax_rows(logits->value.ptr(), n, k, probs->data());
    auto out = make_leaf(Tensor<T>({1}));
    T loss = 0;
    for (int i = 0; i < n; ++i)
        loss -= std::log(std::max((*probs)[static_cast<size_t>(i) * k + labels[i]], T(1e-30)));
    out->value.data[0] = loss / static_cast<T>(n);
    out->parents = {logits};
    Node<T>* o = out.get();
    Node<T>* lp = logits.get();
    out->backward_fn = [o, lp, probs, labels, n, k]() {
        T g = o->grad.data[0] / static_cast<T>(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) {
                T t = (*probs)[static_cast<size_t>(i) * k + j] - (j == labels[i] ? T(1) : T(0));
                lp->grad.data[static_cast<size_t>(i) * k + j] += g * t;
            }
        }
    };
    return out;
}

// mean over rows of cross-entropy against the uniform distribution; the
// minimum value log(k) is attained when the logits are uniform
template <typename T>
NodeP<T> softmax_ce_uniform(const NodeP<T>& logits) {
    const auto& s = logits->value.shape;
    if (s.size() != 2) throw ValidationError("ce: rank mismatch");
    int n = s[0], k = s[1];
    auto probs = std::make_shared<std::vector<T>>(static_cast<size_t>(n) * k);
    detail::softmax_rows(logits->value.ptr(), n, k, probs->data());
    auto out = make_leaf(Tensor<T>({1}));
    T loss = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
            loss -= std::log(std::max((*probs)[static_cast<size_t>(i) * k + j], T(1e-30))) / k;
    out->value.data[0] = loss / static_cast<T>(n);
    out->parents = {logits};
    Node<T>* o = out.get();
    Node<T>* lp = logits.get();
    out->backward_fn = [o, lp, probs, n, k]() {
        T g = o->grad.data[0] / static_cast<T>(n);
        T u = T(1) / static_cast<T>(k);
        for (size_t i = 0; i < static_cast<size_t>(n) * k; ++i)
            lp->grad.data[i] += g * ((*probs)[i] - u);
    };
    return out;
}

// mean over rows of 0.5 * sum_d (exp(logvar) + mu^2 - 1 - logvar)
template <typename T>
NodeP<T> kl_std_normal(const NodeP<T>& mu, const NodeP<T>& logvar) {
    if (!mu->value.same_shape(logvar->value)) throw ValidationError("kl: shape mismatch");
    if (mu->value.shape.size() != 2) throw ValidationError("kl: rank mismatch");
    int n = mu->value.shape[0];
    auto out = make_leaf(Tensor<T>({1}));
    T s = 0;
    for (size_t i = 0; i < mu->value.data.size(); ++i) {
        T m = mu->value.data[i], lv = logvar->value.data[i];
        s += std::exp(lv) + m * m - T(1) - lv;
    }
    out->value.data[0] = s / T(2) / static_cast<T>(n);
    out->parents = {mu, logvar};
    Node<T>* o = out.get();
    Node<T>* mp = mu.get();
    Node<T>* lp = logvar.get();
    out->backward_fn = [o, mp, lp, n]() {
        T g = o->grad.data[0] / static_cast<T>(n);
        for (size_t i = 0; i < mp->value.data.size(); ++i) {
            mp->grad.data[i] += g * mp->value.data[i];
            lp->grad.data[i] += g * (std::exp(lp->value.data[i]) - T(1)) / T(2);
        }
    };
    return out;
}

// mu + exp(logvar / 2) * eps with eps held constant
template <typename T>
NodeP<T> reparam_sample(const NodeP<T>& mu, const NodeP<T>& logvar, const Tensor<T>& eps) {
    if (!mu->value.same_shape(logvar->value) || !mu->value.same_shape(eps))
        throw ValidationError("reparam: shape mismatch");
    auto out = make_leaf(Tensor<T>(mu->value.shape));
    for (size_t i = 0; i < mu->value.data.size(); ++i)
        out->value.data[i] =
            mu->value.data[i] + std::exp(logvar->value.data[i] / T(2)) * eps.data[i];
    out->parents = {mu, logvar};
    Node<T>* o = out.get();
    Node<T>* mp = mu.get();
    Node<T>* lp = logvar.get();
    auto eps_copy = std::make_shared<std::vector<T>>(eps.data);
    out->backward_fn = [o, mp, lp, eps_copy]() {
        for (size_t i = 0; i < mp->value.data.size(); ++i) {
            mp->grad.data[i] += o->grad.data[i];
            lp->grad.data[i] += o->grad.data[i] *
                                std::exp(lp->value.data[i] / T(2)) * (*eps_copy)[i] / T(2);
        }
    };
    return out;
}

// weighted sum of scalar nodes
template <typename T>
NodeP<T> weighted_sum(const std::vector<std::pair<NodeP<T>, T>>& terms) {
    if (terms.empty()) throw ValidationError("weighted_sum: empty");
    auto out = make_leaf(Tensor<T>({1}));
    T s = 0;
    for (const auto& [node, w] : terms) {
        if (node->value.numel() != 1) throw ValidationError("weighted_sum: non-scalar term");
        s += w * node->value.data[0];
    }
    out->value.data[0] = s;
    std::vector<T> ws;
    for (const auto& [node, w] : terms) {
        out->parents.push_back(node);
        ws.push_back(w);
    }
    Node<T>* o = out.get();
    std::vector<Node<T>*> ps;
    for (const auto& [node, w] : terms) ps.push_back(node.get());
    out->backward_fn = [o, ps, ws]() {
        for (size_t i = 0; i < ps.size(); ++i) ps[i]->grad.data[0] += o->grad.data[0] * ws[i];
    };
    return out;
}

}  // namespace nsaug::nn
