#include "shortclass/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "shortclass/kernels.hpp"

namespace shortclass::neural {

namespace {

Var make_node(Tensor value, std::vector<Var> parents,
              std::function<void(Node&)> backward_fn) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->parents = std::move(parents);
    bool any = false;
    for (const auto& p : n->parents) any = any || p->requires_grad;
    n->requires_grad = any;
    if (any) n->backward_fn = std::move(backward_fn);
    return n;
}

double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

Var constant(Tensor t) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    n->requires_grad = false;
    return n;
}

Var parameter(Tensor t) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    n->requires_grad = true;
    return n;
}

Var matmul(const Var& a, const Var& b) {
    if (a->value.cols != b->value.rows) throw NumericError("matmul: shape mismatch");
    Tensor out(a->value.rows, b->value.cols);
    kernels::matmul(a->value.data.data(), b->value.data.data(), out.data.data(),
                    a->value.rows, a->value.cols, b->value.cols);
    Var va = a, vb = b;
    return make_node(std::move(out), {a, b}, [va, vb](Node& self) {
        const std::size_t m = va->value.rows, k = va->value.cols, n = vb->value.cols;
        if (va->requires_grad) {
            va->ensure_grad();
            kernels::matmul_nt_add(self.grad.data(), vb->value.data.data(),
                                   va->grad.data(), m, n, k);
        }
        if (vb->requires_grad) {
            vb->ensure_grad();
            kernels::matmul_tn_add(va->value.data.data(), self.grad.data(),
                                   vb->grad.data(), k, m, n);
        }
    });
}

Var add(const Var& a, const Var& b) {
    if (a->value.rows != b->value.rows || a->value.cols != b->value.cols)
        throw NumericError("add: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += b->value.data[i];
    Var va = a, vb = b;
    return make_node(std::move(out), {a, b}, [va, vb](Node& self) {
        if (va->requires_grad) {
            va->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i) va->grad[i] += self.grad[i];
        }
        if (vb->requires_grad) {
            vb->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i) vb->grad[i] += self.grad[i];
        }
    });
}

Var add_bias(const Var& a, const Var& bias) {
    if (bias->value.rows != 1 || bias->value.cols != a->value.cols)
        throw NumericError("add_bias: bias must be [1 x cols]");
    Tensor out = a->value;
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < out.cols; ++c) out.at(r, c) += bias->value.data[c];
    Var va = a, vb = bias;
    return make_node(std::move(out), {a, bias}, [va, vb](Node& self) {
        const std::size_t rows = self.value.rows, cols = self.value.cols;
        if (va->requires_grad) {
            va->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i) va->grad[i] += self.grad[i];
        }
        if (vb->requires_grad) {
            vb->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    vb->grad[c] += self.grad[r * cols + c];
        }
    });
}

Var mul(const Var& a, const Var& b) {
    if (a->value.rows != b->value.rows || a->value.cols != b->value.cols)
        throw NumericError("mul: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= b->value.data[i];
    Var va = a, vb = b;
    return make_node(std::move(out), {a, b}, [va, vb](Node& self) {
        if (va->requires_grad) {
            va->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                va->grad[i] += self.grad[i] * vb->value.data[i];
        }
        if (vb->requires_grad) {
            vb->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                vb->grad[i] += self.grad[i] * va->value.data[i];
        }
    });
}

Var relu(const Var& x) {
    Tensor out = x->value;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    Var vx = x;
    return make_node(std::move(out), {x}, [vx](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            if (vx->value.data[i] > 0.0) vx->grad[i] += self.grad[i];
    });
}

Var sigmoid(const Var& x) {
    Tensor out = x->value;
    for (double& v : out.data) v = stable_sigmoid(v);
    Var vx = x;
    return make_node(std::move(out), {x}, [vx](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            double s = self.value.data[i];
            vx->grad[i] += self.grad[i] * s * (1.0 - s);
        }
    });
}

Var tanh_act(const Var& x) {
    Tensor out = x->value;
    for (double& v : out.data) v = std::tanh(v);
    Var vx = x;
    return make_node(std::move(out), {x}, [vx](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            double t = self.value.data[i];
            vx->grad[i] += self.grad[i] * (1.0 - t * t);
        }
    });
}

Var embedding_rows(const Var& table, const std::vector<std::int32_t>& ids) {
    const std::size_t e = table->value.cols;
    Tensor out(ids.size(), e);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto id = static_cast<std::size_t>(ids[r]);
        const double* src = table->value.data.data() + id * e;
        std::copy(src, src + e, out.data.data() + r * e);
    }
    Var vt = table;
    std::vector<std::int32_t> ids_copy = ids;
    return make_node(std::move(out), {table}, [vt, ids_copy](Node& self) {
        if (!vt->requires_grad) return;
        vt->ensure_grad();
        const std::size_t e = vt->value.cols;
        for (std::size_t r = 0; r < ids_copy.size(); ++r) {
            double* dst = vt->grad.data() + static_cast<std::size_t>(ids_copy[r]) * e;
            const double* src = self.grad.data() + r * e;
            for (std::size_t c = 0; c < e; ++c) dst[c] += src[c];
        }
    });
}

Var reshape(const Var& x, std::size_t rows, std::size_t cols) {
    if (rows * cols != x->value.size()) throw NumericError("reshape: size mismatch");
    Tensor out(rows, cols);
    out.data = x->value.data;
    Var vx = x;
    return make_node(std::move(out), {x}, [vx](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) vx->grad[i] += self.grad[i];
    });
}

Var concat_cols(const Var& a, const Var& b) {
    if (a->value.rows != b->value.rows) throw NumericError("concat_cols: row mismatch");
    const std::size_t rows = a->value.rows, ca = a->value.cols, cb = b->value.cols;
    Tensor out(rows, ca + cb);
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy(a->value.data.begin() + r * ca, a->value.data.begin() + (r + 1) * ca,
                  out.data.begin() + r * (ca + cb));
        std::copy(b->value.data.begin() + r * cb, b->value.data.begin() + (r + 1) * cb,
                  out.data.begin() + r * (ca + cb) + ca);
    }
    Var va = a, vb = b;
    return make_node(std::move(out), {a, b}, [va, vb, rows, ca, cb](Node& self) {
        if (va->requires_grad) {
            va->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < ca; ++c)
                    va->grad[r * ca + c] += self.grad[r * (ca + cb) + c];
        }
        if (vb->requires_grad) {
            vb->ensure_grad();
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cb; ++c)
                    vb->grad[r * cb + c] += self.grad[r * (ca + cb) + ca + c];
        }
    });
}

Var slice_cols(const Var& x, std::size_t start, std::size_t count) {
    if (start + count > x->value.cols) throw NumericError("slice_cols: out of range");
    const std::size_t rows = x->value.rows, cols = x->value.cols;
    Tensor out(rows, count);
    for (std::size_t r = 0; r < rows; ++r)
        std::copy(x->value.data.begin() + r * cols + start,
                  x->value.data.begin() + r * cols + start + count,
                  out.data.begin() + r * count);
    Var vx = x;
    return make_node(std::move(out), {x}, [vx, start, count, rows, cols](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < count; ++c)
                vx->grad[r * cols + start + c] += self.grad[r * count + c];
    });
}

Var dropout(const Var& x, double rate, Rng& rng, bool train) {
    if (!train || rate <= 0.0) return x;
    const double keep = 1.0 - rate;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto mask = std::make_shared<std::vector<double>>(x->value.size());
    for (double& m : *mask) m = unit(rng) < keep ? 1.0 / keep : 0.0;
    Tensor out = x->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= (*mask)[i];
    Var vx = x;
    return make_node(std::move(out), {x}, [vx, mask](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            vx->grad[i] += self.grad[i] * (*mask)[i];
    });
}

Var conv1d_same(const Var& x, const Var& weights, const Var& bias,
                std::size_t batch, std::size_t len, std::size_t emb,
                std::size_t kernel) {
    if (x->value.rows != batch || x->value.cols != len * emb)
        throw NumericError("conv1d: input must be [batch x len*emb]");
    const std::size_t filters = weights->value.rows;
    if (weights->value.cols != kernel * emb) throw NumericError("conv1d: weight shape");
    const std::size_t pad = (kernel - 1) / 2;

    Tensor out(batch * len, filters);
#pragma omp parallel for schedule(static)
    for (long long bb = 0; bb < static_cast<long long>(batch); ++bb) {
        const auto b = static_cast<std::size_t>(bb);
        const double* xb = x->value.data.data() + b * len * emb;
        for (std::size_t l = 0; l < len; ++l) {
            double* o = out.data.data() + (b * len + l) * filters;
            for (std::size_t f = 0; f < filters; ++f) o[f] = bias->value.data[f];
            for (std::size_t k = 0; k < kernel; ++k) {
                const long long src = static_cast<long long>(l + k) - static_cast<long long>(pad);
                if (src < 0 || src >= static_cast<long long>(len)) continue;
                const double* xe = xb + static_cast<std::size_t>(src) * emb;
                for (std::size_t f = 0; f < filters; ++f) {
                    const double* wf = weights->value.data.data() + f * kernel * emb + k * emb;
                    double acc = 0.0;
                    for (std::size_t e = 0; e < emb; ++e) acc += xe[e] * wf[e];
                    o[f] += acc;
                }
            }
        }
    }

    Var vx = x, vw = weights, vb = bias;
    return make_node(std::move(out), {x, weights, bias},
                     [vx, vw, vb, batch, len, emb, kernel](Node& self) {
        const std::size_t filters = vw->value.rows;
        const std::size_t pad = (kernel - 1) / 2;
        if (vx->requires_grad) {
            vx->ensure_grad();
#pragma omp parallel for schedule(static)
            for (long long bb = 0; bb < static_cast<long long>(batch); ++bb) {
                const auto b = static_cast<std::size_t>(bb);
                double* gx = vx->grad.data() + b * len * emb;
                for (std::size_t l = 0; l < len; ++l) {
                    const double* go = self.grad.data() + (b * len + l) * filters;
                    for (std::size_t k = 0; k < kernel; ++k) {
                        const long long src =
                            static_cast<long long>(l + k) - static_cast<long long>(pad);
                        if (src < 0 || src >= static_cast<long long>(len)) continue;
                        double* gxe = gx + static_cast<std::size_t>(src) * emb;
                        for (std::size_t f = 0; f < filters; ++f) {
                            const double* wf =
                                vw->value.data.data() + f * kernel * emb + k * emb;
                            const double g = go[f];
                            for (std::size_t e = 0; e < emb; ++e) gxe[e] += g * wf[e];
                        }
                    }
                }
            }
        }
        if (vw->requires_grad) {
            vw->ensure_grad();
#pragma omp parallel for schedule(static)
            for (long long ff = 0; ff < static_cast<long long>(filters); ++ff) {
                const auto f = static_cast<std::size_t>(ff);
                double* gw = vw->grad.data() + f * kernel * emb;
                for (std::size_t b = 0; b < batch; ++b) {
                    const double* xb = vx->value.data.data() + b * len * emb;
                    for (std::size_t l = 0; l < len; ++l) {
                        const double g = self.grad[(b * len + l) * filters + f];
                        if (g == 0.0) continue;
                        for (std::size_t k = 0; k < kernel; ++k) {
                            const long long src =
                                static_cast<long long>(l + k) - static_cast<long long>(pad);
                            if (src < 0 || src >= static_cast<long long>(len)) continue;
                            const double* xe = xb + static_cast<std::size_t>(src) * emb;
                            for (std::size_t e = 0; e < emb; ++e) gw[k * emb + e] += g * xe[e];
                        }
                    }
                }
            }
        }
        if (vb->requires_grad) {
            vb->ensure_grad();
            for (std::size_t r = 0; r < self.value.rows; ++r)
                for (std::size_t f = 0; f < filters; ++f)
                    vb->grad[f] += self.grad[r * filters + f];
        }
    });
}

Var maxpool_time(const Var& x, std::size_t batch, std::size_t len, std::size_t window) {
    if (x->value.rows != batch * len) throw NumericError("maxpool_time: shape mismatch");
    if (window == 0 || window > len) throw NumericError("maxpool_time: bad window");
    const std::size_t f = x->value.cols;
    const std::size_t out_len = (len + window - 1) / window;
    Tensor out(batch * out_len, f);
    auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < out_len; ++o) {
            const std::size_t l0 = o * window;
            const std::size_t l1 = std::min(len, l0 + window);
            for (std::size_t c = 0; c < f; ++c) {
                double best = x->value.data[(b * len + l0) * f + c];
                std::size_t best_idx = (b * len + l0) * f + c;
                for (std::size_t l = l0 + 1; l < l1; ++l) {
                    double v = x->value.data[(b * len + l) * f + c];
                    if (v > best) {
                        best = v;
                        best_idx = (b * len + l) * f + c;
                    }
                }
                out.data[(b * out_len + o) * f + c] = best;
                (*argmax)[(b * out_len + o) * f + c] = best_idx;
            }
        }
    }
    Var vx = x;
    return make_node(std::move(out), {x}, [vx, argmax](Node& self) {
        if (!vx->requires_grad) return;
        vx->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            vx->grad[(*argmax)[i]] += self.grad[i];
    });
}

Var bce_with_logits_mean(const Var& z, const std::vector<double>& targets) {
    if (z->value.cols != 1 || z->value.rows != targets.size())
        throw NumericError("bce_with_logits_mean: shape mismatch");
    const std::size_t n = targets.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double zi = z->value.data[i];
        loss += std::max(zi, 0.0) - zi * targets[i] + std::log1p(std::exp(-std::abs(zi)));
    }
    Tensor out(1, 1);
    out.data[0] = loss / static_cast<double>(n);
    Var vz = z;
    auto y = std::make_shared<std::vector<double>>(targets);
    return make_node(std::move(out), {z}, [vz, y](Node& self) {
        if (!vz->requires_grad) return;
        vz->ensure_grad();
        const double g = self.grad[0] / static_cast<double>(y->size());
        for (std::size_t i = 0; i < y->size(); ++i)
            vz->grad[i] += g * (stable_sigmoid(vz->value.data[i]) - (*y)[i]);
    });
}

Var bce_mean(const Var& p, const std::vector<double>& targets) {
    if (p->value.cols != 1 || p->value.rows != targets.size())
        throw NumericError("bce_mean: shape mismatch");
    const std::size_t n = targets.size();
    const double eps = 1e-12;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pi = std::clamp(p->value.data[i], eps, 1.0 - eps);
        loss -= targets[i] * std::log(pi) + (1.0 - targets[i]) * std::log(1.0 - pi);
    }
    Tensor out(1, 1);
    out.data[0] = loss / static_cast<double>(n);
    Var vp = p;
    auto y = std::make_shared<std::vector<double>>(targets);
    return make_node(std::move(out), {p}, [vp, y, eps](Node& self) {
        if (!vp->requires_grad) return;
        vp->ensure_grad();
        const double g = self.grad[0] / static_cast<double>(y->size());
        for (std::size_t i = 0; i < y->size(); ++i) {
            double pi = std::clamp(vp->value.data[i], eps, 1.0 - eps);
            vp->grad[i] += g * (pi - (*y)[i]) / (pi * (1.0 - pi));
        }
    });
}

Var sum_squares_scaled(const Var& w, double coef) {
    double s = 0.0;
    for (double v : w->value.data) s += v * v;
    Tensor out(1, 1);
    out.data[0] = coef * s;
    Var vw = w;
    return make_node(std::move(out), {w}, [vw, coef](Node& self) {
        if (!vw->requires_grad) return;
        vw->ensure_grad();
        const double g = 2.0 * coef * self.grad[0];
        for (std::size_t i = 0; i < vw->grad.size(); ++i)
            vw->grad[i] += g * vw->value.data[i];
    });
}

Var add_scalars(const std::vector<Var>& scalars) {
    if (scalars.empty()) throw NumericError("add_scalars: empty");
    Tensor out(1, 1);
    for (const auto& s : scalars) out.data[0] += s->value.data[0];
    std::vector<Var> parents = scalars;
    return make_node(std::move(out), parents, [parents](Node& self) {
        for (const auto& p : parents) {
            if (!p->requires_grad) continue;
            p->ensure_grad();
            p->grad[0] += self.grad[0];
        }
    });
}

void backward(const Var& loss) {
    if (loss->value.size() != 1) throw NumericError("backward: loss must be scalar");
    if (!std::isfinite(loss->value.data[0]))
        throw NumericError("backward: non-finite loss");

    // Iterative topological sort over the reachable graph.
    std::vector<Node*> topo;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next].get();
            ++next;
            if (!visited.count(p)) {
                visited.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }

    for (Node* n : topo) {
        if (n->requires_grad) {
            n->ensure_grad();
            std::fill(n->grad.begin(), n->grad.end(), 0.0);
        }
    }
    loss->ensure_grad();
    loss->grad[0] = 1.0;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && n->requires_grad) n->backward_fn(*n);
    }
}

Tensor xavier_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                      std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor t(rows, cols);
    for (double& v : t.data) v = dist(rng);
    return t;
}

Adam::Adam(std::vector<Var> params, double learning_rate)
    : params_(std::move(params)), lr_(learning_rate) {
    for (const auto& p : params_) {
        m_.emplace_back(p->value.size(), 0.0);
        v_.emplace_back(p->value.size(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t p = 0; p < params_.size(); ++p) {
        auto& node = *params_[p];
        if (node.grad.size() != node.value.size()) continue;  // not in this graph
        auto& m = m_[p];
        auto& v = v_[p];
        for (std::size_t i = 0; i < node.value.size(); ++i) {
            const double g = node.grad[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            node.value.data[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
        node.grad.clear();  // stale gradients must never leak into the next step
    }
}

}  // namespace shortclass::neural
