#include "amf/forecasters.hpp"

#include <cmath>
#include <stdexcept>

namespace amf {

void NodeStats::add_class(int label, int n_classes) {
    if (n_classes < 2) throw std::invalid_argument("add_class: need at least two classes");
    if (label < 0 || label >= n_classes)
        throw std::invalid_argument("add_class: label out of range");
    if (class_counts.empty()) class_counts.assign(static_cast<std::size_t>(n_classes), 0);
    class_counts[static_cast<std::size_t>(label)] += 1;
    count += 1;
}

void NodeStats::add_value(double label) {
    if (!std::isfinite(label)) throw std::invalid_argument("add_value: non-finite label");
    label_sum += label;
    count += 1;
}

double LossKind::default_eta() const {
    if (loss == Loss::log_loss) return 1.0;
    return 1.0 / (8.0 * bound * bound);
}

std::vector<double> kt_predict(const NodeStats& stats, int n_classes) {
    if (n_classes < 2) throw std::invalid_argument("kt_predict: need at least two classes");
    const std::size_t k = static_cast<std::size_t>(n_classes);
    std::vector<double> p(k);
    const double denom = static_cast<double>(stats.count) + 0.5 * static_cast<double>(n_classes);
    for (std::size_t c = 0; c < k; ++c) {
        const double n_c = stats.class_counts.empty() ? 0.0 : static_cast<double>(stats.class_counts[c]);
        p[c] = (n_c + 0.5) / denom;
    }
    return p;
}

double mean_predict(const NodeStats& stats) {
    if (stats.count == 0) return 0.0;
    return stats.label_sum / static_cast<double>(stats.count);
}

double loss_value(const LossKind& kind, std::span<const double> pred, double y) {
    if (kind.loss == Loss::log_loss) {
        const auto idx = static_cast<std::size_t>(y);
        if (y < 0.0 || static_cast<double>(idx) != y || idx >= pred.size())
            throw std::invalid_argument("loss_value: class label out of range");
        if (!(pred[idx] > 0.0))
            throw std::invalid_argument("loss_value: zero probability mass at the observed label");
        return -std::log(pred[idx]);
    }
    if (pred.size() != 1) throw std::invalid_argument("loss_value: quadratic expects one value");
    if (std::abs(y) > kind.bound)
        throw std::invalid_argument("loss_value: label outside [-B, B]");
    const double d = pred[0] - y;
    return d * d;
}

}  // namespace amf
