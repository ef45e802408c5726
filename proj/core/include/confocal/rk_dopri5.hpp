#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

namespace confocal {

// Dormand-Prince 5(4) embedded pair with PI step control and the standard
// quartic dense-output interpolant. Steps carry a sign, so integration runs
// in either time direction.
template <std::size_t N>
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<double, N> r1{}, r2{}, r3{}, r4{}, r5{};

    double t1() const { return t0 + h; }

    std::array<double, N> eval(double t) const {
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        std::array<double, N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        return y;
    }

    bool contains(double t) const {
        return h > 0 ? (t >= t0 && t <= t1()) : (t <= t0 && t >= t1());
    }
};

enum class StepResult { ok, reached_limit, step_underflow };

template <std::size_t N>
class Dopri5 {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;

    Dopri5(Rhs rhs, double tol) : rhs_(std::move(rhs)), atol_(tol), rtol_(tol) {}

    void reset(double t, const State& y) {
        t_ = t;
        y_ = y;
        h_ = 0.0;
        fac_old_ = 1e-4;
        have_k1_ = false;
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const DenseSegment<N>& segment() const { return seg_; }
    long steps() const { return steps_; }
    long rejected() const { return rejected_; }
    long rhs_evals() const { return evals_; }

    // Take one accepted step toward t_limit (the final step is clipped to hit
    // it exactly). Returns reached_limit when t_ lands on t_limit.
    StepResult advance(double t_limit) {
        const double dir = t_limit > t_ ? 1.0 : -1.0;
        if (t_limit == t_) return StepResult::reached_limit;
        if (!have_k1_) {
            rhs_(t_, y_, k_[0]);
            ++evals_;
            have_k1_ = true;
        }
        if (h_ == 0.0) h_ = dir * initial_step(dir, std::abs(t_limit - t_));
        if (dir * h_ < 0.0) h_ = -h_;

        for (int attempt = 0; attempt < 1000; ++attempt) {
            bool clipped = false;
            if (dir * (t_ + h_ - t_limit) >= 0.0) {
                h_ = t_limit - t_;
                clipped = true;
            }
            if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(t_))) {
                if (clipped) { // limit is effectively reached
                    t_ = t_limit;
                    return StepResult::reached_limit;
                }
                return StepResult::step_underflow;
            }

            const double err = attempt_step();
            if (err <= 1.0) {
                accept_step();
                const double fac = step_factor(err);
                fac_old_ = std::max(err, 1e-4);
                if (!clipped) h_ /= fac;
                ++steps_;
                return (t_ == t_limit) ? StepResult::reached_limit : StepResult::ok;
            }
            ++rejected_;
            h_ /= std::min(facc1_, std::pow(err, expo1_) / safe_);
        }
        return StepResult::step_underflow;
    }

private:
    double initial_step(double dir, double span) const {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = atol_ + rtol_ * std::abs(y_[i]);
            dnf += (k_[0][i] / sk) * (k_[0][i] / sk);
            dny += (y_[i] / sk) * (y_[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, span);
        (void)dir;
        return h;
    }

    // Returns the scaled error; on success stage results are staged in y1_.
    double attempt_step() {
        static constexpr double a21 = 1.0 / 5.0;
        static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                                a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                                a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                                a65 = -5103.0 / 18656.0;
        static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                                a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
        static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
        static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                                e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        const double h = h_;
        State yt;
        auto stage = [&](const std::initializer_list<std::pair<int, double>>& terms, double c,
                         int out) {
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (const auto& [idx, w] : terms) acc += w * k_[idx][i];
                yt[i] = y_[i] + h * acc;
            }
            rhs_(t_ + c * h, yt, k_[out]);
            ++evals_;
        };

        stage({{0, a21}}, c2, 1);
        stage({{0, a31}, {1, a32}}, c3, 2);
        stage({{0, a41}, {1, a42}, {2, a43}}, c4, 3);
        stage({{0, a51}, {1, a52}, {2, a53}, {3, a54}}, c5, 4);
        stage({{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}}, 1.0, 5);
        for (std::size_t i = 0; i < N; ++i)
            y1_[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                                  a75 * k_[4][i] + a76 * k_[5][i]);
        rhs_(t_ + h, y1_, k_[6]);
        ++evals_;

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(y1_[i]));
            const double ei = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                   e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            err += (ei / sk) * (ei / sk);
        }
        return std::sqrt(err / N);
    }

    void accept_step() {
        static constexpr double d1 = -12715105075.0 / 11282082432.0,
                                d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0,
                                d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
        seg_.t0 = t_;
        seg_.h = h_;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y1_[i] - y_[i];
            const double bspl = h_ * k_[0][i] - ydiff;
            seg_.r1[i] = y_[i];
            seg_.r2[i] = ydiff;
            seg_.r3[i] = bspl;
            seg_.r4[i] = ydiff - h_ * k_[6][i] - bspl;
            seg_.r5[i] = h_ * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] + d5 * k_[4][i] +
                               d6 * k_[5][i] + d7 * k_[6][i]);
        }
        t_ += h_;
        y_ = y1_;
        k_[0] = k_[6]; // FSAL
    }

    double step_factor(double err) const {
        const double fac11 = std::pow(err, expo1_);
        double fac = fac11 / std::pow(fac_old_, beta_);
        return std::clamp(fac / safe_, facc2_, facc1_);
    }

    static constexpr double beta_ = 0.04;
    static constexpr double expo1_ = 0.2 - beta_ * 0.75;
    static constexpr double safe_ = 0.9;
    static constexpr double facc1_ = 1.0 / 0.2; // max shrink per retry
    static constexpr double facc2_ = 1.0 / 10.0; // max growth

    Rhs rhs_;
    double atol_, rtol_;
    double t_ = 0.0;
    double h_ = 0.0;
    double fac_old_ = 1e-4;
    bool have_k1_ = false;
    State y_{}, y1_{};
    std::array<State, 7> k_{};
    DenseSegment<N> seg_;
    long steps_ = 0, rejected_ = 0, evals_ = 0;
};

} // namespace confocal
