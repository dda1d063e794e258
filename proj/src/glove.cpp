#include "embtk/glove.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "train_internal.hpp"

namespace embtk {

GloveParameters init_glove_parameters(std::int32_t vocab_size, std::int32_t dim, Rng& rng) {
    GloveParameters p;
    p.w = Matrix(vocab_size, dim);
    p.wc = Matrix(vocab_size, dim);
    real s = 0.5 / dim;
    detail::init_uniform(p.w, -s, s, rng);
    detail::init_uniform(p.wc, -s, s, rng);
    p.b.resize(vocab_size);
    p.bc.resize(vocab_size);
    for (auto& v : p.b) v = rng.uniform(-s, s);
    for (auto& v : p.bc) v = rng.uniform(-s, s);
    p.gw = Matrix(vocab_size, dim);
    p.gwc = Matrix(vocab_size, dim);
    p.gw.fill(1.0);
    p.gwc.fill(1.0);
    p.gb.assign(vocab_size, 1.0);
    p.gbc.assign(vocab_size, 1.0);
    return p;
}

real glove_weight(real x, real x_max, real alpha) {
    return x < x_max ? std::pow(x / x_max, alpha) : 1.0;
}

real glove_record_residual(const GloveParameters& p, const CoocRecord& r) {
    return dot(p.w.row(r.i), p.wc.row(r.j)) + p.b[r.i] + p.bc[r.j] - std::log(r.x);
}

real glove_record_loss(const GloveParameters& p, const CoocRecord& r, real x_max,
                       real alpha) {
    real diff = glove_record_residual(p, r);
    return glove_weight(r.x, x_max, alpha) * diff * diff;
}

real glove_record_step(GloveParameters& p, const CoocRecord& r, real lr, real x_max,
                       real alpha) {
    real f = glove_weight(r.x, x_max, alpha);
    real diff = glove_record_residual(p, r);
    real fdiff = 2.0 * f * diff;

    auto wi = p.w.row(r.i);
    auto wj = p.wc.row(r.j);
    auto gi = p.gw.row(r.i);
    auto gj = p.gwc.row(r.j);
    for (std::size_t d = 0; d < wi.size(); ++d) {
        real grad_i = fdiff * wj[d];
        real grad_j = fdiff * wi[d];
        wi[d] -= lr * grad_i / std::sqrt(gi[d]);
        wj[d] -= lr * grad_j / std::sqrt(gj[d]);
        gi[d] += grad_i * grad_i;
        gj[d] += grad_j * grad_j;
    }
    p.b[r.i] -= lr * fdiff / std::sqrt(p.gb[r.i]);
    p.bc[r.j] -= lr * fdiff / std::sqrt(p.gbc[r.j]);
    p.gb[r.i] += fdiff * fdiff;
    p.gbc[r.j] += fdiff * fdiff;
    return f * diff * diff;
}

EmbeddingModel train_glove(const std::vector<CoocRecord>& records, const Vocabulary& vocab,
                           const TrainingConfig& cfg, TrainReport* report) {
    if (records.empty()) throw std::invalid_argument("empty co-occurrence record set");
    if (vocab.size() == 0) throw std::invalid_argument("empty vocabulary");
    if (cfg.dim <= 0) throw std::invalid_argument("dim must be positive");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cfg.initial_lr <= 0) throw std::invalid_argument("initial_lr must be positive");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (cfg.x_max <= 0 || cfg.alpha <= 0)
        throw std::invalid_argument("x_max and alpha must be positive");
    for (const auto& r : records) {
        if (r.i < 0 || r.i >= vocab.size() || r.j < 0 || r.j >= vocab.size())
            throw std::invalid_argument("co-occurrence id out of vocabulary range");
        if (!(r.x > 0)) throw std::invalid_argument("co-occurrence weight must be > 0");
    }

    auto t0 = std::chrono::steady_clock::now();
    Rng init_rng(cfg.seed);
    GloveParameters params = init_glove_parameters(vocab.size(), cfg.dim, init_rng);

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(detail::mix_seed(cfg.seed, 0x517e));

    std::vector<real> epoch_losses;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        detail::fisher_yates(order, shuffle_rng);
        auto ranges = detail::split_ranges(order.size(), cfg.workers);
        std::vector<double> losses(cfg.workers, 0.0);
        auto run = [&](int w) {
            double loss = 0;
            for (std::size_t idx = ranges[w].first; idx < ranges[w].second; ++idx)
                loss += glove_record_step(params, records[order[idx]], cfg.initial_lr,
                                          cfg.x_max, cfg.alpha);
            losses[w] = loss;
        };
        if (cfg.workers == 1) {
            run(0);
        } else {
            std::vector<std::thread> threads;
            for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(run, w);
            for (auto& t : threads) t.join();
        }
        double total = std::accumulate(losses.begin(), losses.end(), 0.0);
        real mean = total / static_cast<double>(records.size());
        if (!std::isfinite(mean))
            throw std::runtime_error("glove training diverged at epoch " +
                                     std::to_string(epoch + 1));
        epoch_losses.push_back(mean);
        if (cfg.verbose)
            std::fprintf(stderr, "epoch %d/%d loss=%.6f\n", epoch + 1, cfg.epochs, mean);
    }

    detail::check_finite(params.w, "word vectors");
    detail::check_finite(params.wc, "context vectors");

    EmbeddingModel model;
    model.vocab = vocab;
    model.dim = cfg.dim;
    model.algorithm = Algorithm::glove;
    model.input = std::move(params.w);
    if (cfg.glove_sum_context) {
        for (std::int32_t id = 0; id < vocab.size(); ++id)
            axpy(1.0, params.wc.row(id), model.input.row(id));
    }
    if (report) {
        report->epoch_losses = std::move(epoch_losses);
        report->total_tokens = static_cast<std::int64_t>(records.size());
        report->seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return model;
}

}  // namespace embtk
