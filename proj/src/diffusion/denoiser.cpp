#include "forl/diffusion/denoiser.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "forl/numkit/embedding.hpp"
#include "forl/numkit/serialize.hpp"

namespace forl::diffusion {

using num::Matrix;
using nlohmann::json;

void DenoiserConfig::validate() const {
    if (state_dim == 0 || action_dim == 0) throw std::invalid_argument("DenoiserConfig: zero dimension");
    if (window == 0) throw std::invalid_argument("DenoiserConfig: window must be >= 1");
    if (embed_dim == 0 || embed_dim % 2 != 0) throw std::invalid_argument("DenoiserConfig: embed_dim must be even");
    schedule.validate();
}

FeatureScaling FeatureScaling::identity(const DenoiserConfig& cfg) {
    FeatureScaling s;
    s.state_center.assign(cfg.state_dim, 0.0);
    s.state_scale.assign(cfg.state_dim, 1.0);
    s.step_center.assign(cfg.step_dim(), 0.0);
    s.step_scale.assign(cfg.step_dim(), 1.0);
    return s;
}

void FeatureScaling::validate(const DenoiserConfig& cfg) const {
    if (state_center.size() != cfg.state_dim || state_scale.size() != cfg.state_dim ||
        step_center.size() != cfg.step_dim() || step_scale.size() != cfg.step_dim()) {
        throw std::invalid_argument("FeatureScaling: sizes do not match the model dimensions");
    }
    for (double s : state_scale) {
        if (!(s > 0.0)) throw std::invalid_argument("FeatureScaling: scales must be positive");
    }
    for (double s : step_scale) {
        if (!(s > 0.0)) throw std::invalid_argument("FeatureScaling: scales must be positive");
    }
}

DenoiserModel::DenoiserModel(DenoiserConfig config, FeatureScaling scaling, num::MlpParams net)
    : config_(std::move(config)), scaling_(std::move(scaling)), net_(std::move(net)), table_(config_.schedule) {
    config_.validate();
    scaling_.validate(config_);
    if (net_.in_dim() != config_.input_dim() || net_.out_dim() != config_.state_dim) {
        throw std::invalid_argument("DenoiserModel: network shape does not match config (input " +
                                    std::to_string(net_.in_dim()) + ", expected " +
                                    std::to_string(config_.input_dim()) + ")");
    }
    for (int n = 1; n <= config_.schedule.steps; ++n) {
        embeddings_.push_back(num::sinusoidal_embed(n, config_.embed_dim));
    }
}

DenoiserModel DenoiserModel::create(DenoiserConfig config, FeatureScaling scaling, num::Rng& rng) {
    config.validate();
    std::vector<std::size_t> widths{config.input_dim()};
    widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
    widths.push_back(config.state_dim);
    auto net = num::MlpParams::init(widths, num::Activation::silu, rng);
    return DenoiserModel(std::move(config), std::move(scaling), std::move(net));
}

std::vector<double> DenoiserModel::normalize_state(std::span<const double> s) const {
    if (s.size() != config_.state_dim) throw std::invalid_argument("normalize_state: dimension mismatch");
    std::vector<double> z(s.size());
    for (std::size_t d = 0; d < s.size(); ++d) z[d] = (s[d] - scaling_.state_center[d]) / scaling_.state_scale[d];
    return z;
}

std::vector<double> DenoiserModel::denormalize_state(std::span<const double> z) const {
    if (z.size() != config_.state_dim) throw std::invalid_argument("denormalize_state: dimension mismatch");
    std::vector<double> s(z.size());
    for (std::size_t d = 0; d < z.size(); ++d) s[d] = z[d] * scaling_.state_scale[d] + scaling_.state_center[d];
    return s;
}

std::vector<double> DenoiserModel::normalize_window(std::span<const double> window) const {
    if (window.size() != config_.window_width()) {
        throw std::invalid_argument("window has " + std::to_string(window.size()) + " values, expected " +
                                    std::to_string(config_.window_width()));
    }
    const std::size_t sd = config_.step_dim();
    std::vector<double> out(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        const std::size_t c = i % sd;
        out[i] = (window[i] - scaling_.step_center[c]) / scaling_.step_scale[c];
    }
    return out;
}

const std::vector<double>& DenoiserModel::step_embedding(int n) const {
    if (n < 1 || n > config_.schedule.steps) throw std::out_of_range("step_embedding: step out of range");
    return embeddings_[static_cast<std::size_t>(n - 1)];
}

void DenoiserModel::fill_input(Matrix& x, std::size_t row, std::span<const double> z,
                               std::span<const double> window_norm, int n) const {
    auto r = x.row(row);
    const auto& emb = step_embedding(n);
    std::copy(z.begin(), z.end(), r.begin());
    std::copy(window_norm.begin(), window_norm.end(), r.begin() + static_cast<std::ptrdiff_t>(config_.state_dim));
    std::copy(emb.begin(), emb.end(),
              r.begin() + static_cast<std::ptrdiff_t>(config_.state_dim + config_.window_width()));
}

Matrix DenoiserModel::predict_noise(const Matrix& z, std::span<const double> window_norm, int n) const {
    Matrix x(z.rows(), config_.input_dim());
    for (std::size_t i = 0; i < z.rows(); ++i) fill_input(x, i, z.row(i), window_norm, n);
    return num::mlp_forward_batch(net_, x);
}

NoiseDraws draw_noise(std::size_t batch, std::size_t state_dim, const VpSchedule& schedule, num::Rng& rng) {
    NoiseDraws d;
    d.steps.resize(batch);
    d.eps = Matrix(batch, state_dim);
    for (std::size_t i = 0; i < batch; ++i) {
        d.steps[i] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(schedule.steps)));
        for (auto& e : d.eps.row(i)) e = rng.gaussian();
    }
    return d;
}

double denoising_loss(const BatchNoisePredictor& predictor, const Matrix& states, const Matrix& windows,
                      const NoiseDraws& draws, const ScheduleTable& table) {
    if (states.rows() == 0) throw std::invalid_argument("denoising_loss: empty batch");
    Matrix noisy(states.rows(), states.cols());
    for (std::size_t i = 0; i < states.rows(); ++i) {
        const double ab = table.alpha_bar(draws.steps[i]);
        const double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
        for (std::size_t d = 0; d < states.cols(); ++d) noisy(i, d) = a * states(i, d) + b * draws.eps(i, d);
    }
    const Matrix pred = predictor(noisy, windows, draws.steps);
    double total = 0.0;
    for (std::size_t i = 0; i < states.rows(); ++i) {
        for (std::size_t d = 0; d < states.cols(); ++d) {
            const double r = draws.eps(i, d) - pred(i, d);
            total += r * r;
        }
    }
    return total / static_cast<double>(states.rows());
}

namespace {

void check_batch(const DenoiserModel& model, const TrainBatch& batch) {
    const auto& cfg = model.config();
    if (batch.size() == 0) throw std::invalid_argument("training batch is empty");
    if (batch.states.cols() != cfg.state_dim || batch.windows.cols() != cfg.window_width() ||
        batch.windows.rows() != batch.size()) {
        throw std::invalid_argument("training batch shape does not match the model");
    }
}

// Builds the noisy network inputs for one batch and the matching noise targets.
Matrix build_inputs(const DenoiserModel& model, const TrainBatch& batch, const NoiseDraws& draws) {
    const auto& cfg = model.config();
    Matrix x(batch.size(), cfg.input_dim());
    std::vector<double> zn(cfg.state_dim);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto z0 = model.normalize_state(batch.states.row(i));
        const double ab = model.table().alpha_bar(draws.steps[i]);
        const double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
        for (std::size_t d = 0; d < cfg.state_dim; ++d) zn[d] = a * z0[d] + b * draws.eps(i, d);
        model.fill_input(x, i, zn, model.normalize_window(batch.windows.row(i)), draws.steps[i]);
    }
    return x;
}

}  // namespace

double training_step(DenoiserModel& model, const TrainBatch& batch, num::AdamState& opt, num::Rng& rng) {
    check_batch(model, batch);
    const auto& cfg = model.config();
    const NoiseDraws draws = draw_noise(batch.size(), cfg.state_dim, cfg.schedule, rng);
    const Matrix x = build_inputs(model, batch, draws);

    num::MlpTape tape;
    const Matrix pred = num::mlp_forward_batch(model.net(), x, &tape);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Matrix upstream(pred.rows(), pred.cols());
    double total = 0.0;
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t d = 0; d < pred.cols(); ++d) {
            const double r = draws.eps(i, d) - pred(i, d);
            total += r * r;
            upstream(i, d) = -2.0 * r * inv_b;
        }
    }
    const double loss = total * inv_b;
    if (!std::isfinite(loss)) throw std::domain_error("training_step: non-finite loss");

    num::AlignedVector grads(model.net().num_params(), 0.0);
    num::mlp_backward_batch(model.net(), tape, upstream, grads);
    num::adam_step(model.net().flat(), grads, opt);
    return loss;
}

double evaluate_loss(const DenoiserModel& model, const TrainBatch& batch, num::Rng& rng) {
    check_batch(model, batch);
    const auto& cfg = model.config();
    const NoiseDraws draws = draw_noise(batch.size(), cfg.state_dim, cfg.schedule, rng);
    const Matrix pred = num::mlp_forward_batch(model.net(), build_inputs(model, batch, draws));
    double total = 0.0;
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t d = 0; d < pred.cols(); ++d) {
            const double r = draws.eps(i, d) - pred(i, d);
            total += r * r;
        }
    }
    return total / static_cast<double>(batch.size());
}

std::vector<double> run_reverse_chain(const VpSchedule& schedule, std::vector<double> s,
                                      const NoisePredictor& predictor, num::Rng* noise_rng) {
    schedule.validate();
    const std::vector<double> zero(s.size(), 0.0);
    for (int n = schedule.steps; n >= 1; --n) {
        const auto eps = predictor(s, n);
        std::vector<double> noise = zero;
        if (n > 1 && noise_rng) noise = noise_rng->gaussian_vec(s.size());
        s = reverse_step(s, eps, n, noise, schedule);
    }
    return s;
}

Matrix sample_candidates(const DenoiserModel& model, std::span<const double> window, std::size_t k, num::Rng& rng) {
    if (k == 0) throw std::invalid_argument("sample_candidates: k must be >= 1");
    const auto& cfg = model.config();
    const auto wn = model.normalize_window(window);
    const std::uint64_t base = rng.next_u64();
    std::vector<num::Rng> chains;
    chains.reserve(k);
    for (std::size_t i = 0; i < k; ++i) chains.emplace_back(base, i);

    const std::size_t sd = cfg.state_dim;
    Matrix z(k, sd);
    for (std::size_t i = 0; i < k; ++i) {
        for (auto& v : z.row(i)) v = chains[i].gaussian();
    }
    const auto& table = model.table();
    std::vector<double> tail(wn);
    tail.resize(cfg.window_width() + cfg.embed_dim);
    for (int n = cfg.schedule.steps; n >= 1; --n) {
        const auto& emb = model.step_embedding(n);
        std::copy(emb.begin(), emb.end(), tail.begin() + static_cast<std::ptrdiff_t>(cfg.window_width()));
        const auto shared = num::mlp_first_layer_partial(model.net(), sd, tail);
        const Matrix eps = num::mlp_forward_batch_shared(model.net(), z, shared);
        const double a = table.alpha(n);
        const double ab = table.alpha_bar(n);
        const double inv_sqrt_a = 1.0 / std::sqrt(a);
        const double eps_coef = (1.0 - a) / std::sqrt(a * (1.0 - ab));
        const double sigma = std::sqrt(1.0 - a);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t d = 0; d < sd; ++d) {
                double v = z(i, d) * inv_sqrt_a - eps_coef * eps(i, d);
                if (n > 1) v += sigma * chains[i].gaussian();
                if (!std::isfinite(v)) throw std::runtime_error("sample_candidates: non-finite value in reverse chain");
                z(i, d) = v;
            }
        }
    }
    Matrix out(k, sd);
    for (std::size_t i = 0; i < k; ++i) {
        const auto s = model.denormalize_state(z.row(i));
        std::copy(s.begin(), s.end(), out.row(i).begin());
    }
    return out;
}

void save_checkpoint(const std::string& path, const DenoiserModel& model, const std::optional<TrainingState>& training) {
    const auto& cfg = model.config();
    const auto& sc = model.scaling();
    json j;
    j["format"] = "forl-denoiser";
    j["version"] = 1;
    j["config"] = {{"state_dim", cfg.state_dim}, {"action_dim", cfg.action_dim}, {"window", cfg.window},
                   {"embed_dim", cfg.embed_dim}, {"hidden", cfg.hidden}};
    j["schedule"] = {{"steps", cfg.schedule.steps},
                     {"beta_min", cfg.schedule.beta_min},
                     {"beta_max", cfg.schedule.beta_max}};
    j["scaling"] = {{"state_center", sc.state_center},
                    {"state_scale", sc.state_scale},
                    {"step_center", sc.step_center},
                    {"step_scale", sc.step_scale}};
    j["mlp"] = num::to_json(model.net());
    if (training) {
        j["training"] = {{"adam", num::to_json(training->adam)},
                         {"rng", num::to_json(training->rng)},
                         {"step", training->step}};
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint '" + path + "' is not valid JSON: " + e.what());
    }
    if (j.value("format", "") != "forl-denoiser") throw std::runtime_error("'" + path + "' is not a denoiser checkpoint");
    if (j.value("version", 0) != 1) throw std::runtime_error("unsupported checkpoint version");
    DenoiserConfig cfg;
    const auto& c = j.at("config");
    cfg.state_dim = c.at("state_dim").get<std::size_t>();
    cfg.action_dim = c.at("action_dim").get<std::size_t>();
    cfg.window = c.at("window").get<std::size_t>();
    cfg.embed_dim = c.at("embed_dim").get<std::size_t>();
    cfg.hidden = c.at("hidden").get<std::vector<std::size_t>>();
    const auto& s = j.at("schedule");
    cfg.schedule.steps = s.at("steps").get<int>();
    cfg.schedule.beta_min = s.at("beta_min").get<double>();
    cfg.schedule.beta_max = s.at("beta_max").get<double>();
    FeatureScaling sc;
    const auto& js = j.at("scaling");
    sc.state_center = js.at("state_center").get<std::vector<double>>();
    sc.state_scale = js.at("state_scale").get<std::vector<double>>();
    sc.step_center = js.at("step_center").get<std::vector<double>>();
    sc.step_scale = js.at("step_scale").get<std::vector<double>>();
    LoadedCheckpoint out{DenoiserModel(cfg, sc, num::mlp_from_json(j.at("mlp"))), std::nullopt};
    if (j.contains("training")) {
        const auto& t = j.at("training");
        TrainingState ts{num::adam_from_json(t.at("adam")), num::rng_state_from_json(t.at("rng")),
                         t.at("step").get<std::uint64_t>()};
        if (ts.adam.m.size() != out.model.net().num_params()) {
            throw std::runtime_error("checkpoint: optimizer state does not match network size");
        }
        out.training = std::move(ts);
    }
    return out;
}

}  // namespace forl::diffusion
