#pragma once

// Integrable systems given by expressions: critical points of g modulo Phi,
// a grid oracle for fiber connectedness, and the Morse-criterion prediction.

#include "fibcon/expression.hpp"
#include "fibcon/singularity.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fibcon::fiber {

class FiberError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownSystem : public FiberError {
public:
    using FiberError::FiberError;
};

class SpecError : public FiberError {
public:
    SpecError(std::string message, std::size_t line);
    std::size_t line;
};

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool periodic = false;

    double length() const { return hi - lo; }
};

/// A product of factors.  Box factors are bounded boxes, Torus2 is [0,1)^2
/// with both axes periodic, and Sphere is S^2 in (theta, h) coordinates with
/// theta in [0, 2 pi) periodic and h in [-1, 1]; its two pole rows are each
/// glued into a single point.
class Domain {
public:
    enum class FactorKind { Box, Torus2, Sphere };
    struct Factor {
        FactorKind kind;
        std::size_t first_axis;
        std::size_t dimension;
    };

    static Domain box(std::vector<Axis> axes);
    static Domain torus2();
    static Domain sphere();
    static Domain product(const Domain& a, const Domain& b);

    /// `box(lo,hi;lo,hi;...)`, `torus2`, `sphere` or `product(A,B)`.
    static Domain parse(std::string_view text);

    const std::vector<Axis>& axes() const { return axes_; }
    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t dimension() const { return axes_.size(); }
    /// True when no factor is a box.
    bool closed() const;
    std::string to_string() const;

private:
    std::vector<Axis> axes_;
    std::vector<Factor> factors_;
};

struct StabilizerHint {
    std::vector<double> point;
    bool connected = true;
    bool tall = true;
    double radius = 0.1;
};

struct SystemSpec {
    std::string name;
    std::size_t n = 1;
    Domain domain = Domain::torus2();
    std::vector<expr::Expr> phi;
    expr::Expr g;
    std::vector<StabilizerHint> hints;

    bool builtin = false;
    /// Genus of the reduced surface at the default beta, when known.
    std::optional<int> reduced_genus;
    std::vector<double> default_beta;
    std::vector<double> default_levels;
    std::vector<std::string> phi_text;
    std::string g_text;

    std::size_t dimension() const { return 2 * n; }
    /// Phi components followed by g.
    std::vector<expr::Expr> components() const;
    std::vector<double> beta_or_default(const std::vector<double>& beta) const;
    /// Stabilizer data for a point: the first hint whose ball contains it.
    const StabilizerHint* hint_for(const std::vector<double>& x) const;
};

/// Throws SpecError with the offending line.
SystemSpec parse_system_spec(std::string_view text);
SystemSpec read_system_spec_file(const std::string& path);

/// torus_cos, ff_model, elliptic_model(b0,b1,...), short_model, double_bump,
/// torus_cos_x_sphere.  Throws UnknownSystem.
SystemSpec builtin_system(std::string_view name);
std::vector<std::string> builtin_names();

/// {F, G} = sum_j dF/dx_j dG/dy_j - dF/dy_j dG/dx_j.
double poisson_bracket(const expr::Expr& f, const expr::Expr& g, std::size_t n, std::span<const double> x);

/// Every pairwise bracket of Phi_1..Phi_{n-1}, g at `samples` seeded points is
/// at most tol * max(1, |grad F| |grad G|).
bool poisson_check(const SystemSpec& spec, int samples = 200, double tol = 1e-9, std::uint64_t seed = 0);

// ---- fiber oracle ------------------------------------------------------------

struct FiberSample {
    std::vector<std::size_t> resolution;
    std::vector<double> spacing;
    double epsilon = 0.0;
    double lipschitz = 0.0;
    /// Linear cell indices (first axis slowest), sorted.
    std::vector<std::uint64_t> marked;
    /// Component label per marked cell, numbered by smallest cell index.
    std::vector<std::uint32_t> labels;
    std::size_t component_count = 0;
    /// Per component: whether it reaches the boundary of a box factor.
    std::vector<bool> touches_boundary;

    bool empty() const { return marked.empty(); }
    bool any_boundary() const;
};

struct SampleOptions {
    std::size_t resolution = 0; // 0: 512 in dimension 2, 48 in dimension 4, 16 above
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0: hardware concurrency
};

std::size_t default_resolution(std::size_t dimension);

FiberSample sample_fiber(const SystemSpec& spec, const std::vector<double>& beta, double c,
                         const SampleOptions& opts = {});

/// `cell_index,label` lines after a header.
void write_labels_csv(std::ostream& out, const FiberSample& s);

// ---- critical points modulo Phi ----------------------------------------------

struct CriticalPoint {
    std::vector<double> point;
    double g_value = 0.0;
    std::vector<double> phi_value;
    double residual = 0.0;
    /// Symplectic basis of the slice, as columns in R^{2n}.
    Eigen::MatrixXd slice_basis;
    /// Slice Hessian of g - lambda.Phi, the combination vanishing to first order.
    singularity::QuadraticForm hessian = singularity::QuadraticForm::zero(1);
    /// Slice Hessians of a basis of the stabilizer algebra.
    std::vector<singularity::QuadraticForm> span_forms;
};

struct NonConvergence {
    std::vector<double> start;
    double residual;
    std::size_t cluster_size;
};

struct CriticalSearch {
    std::vector<CriticalPoint> points;
    std::vector<NonConvergence> failures;
    std::size_t resolution = 0;
    double threshold = 0.0;
};

struct DetectOptions {
    std::size_t resolution = 0; // 0: 128 in dimension 2, 20 in dimension 4, 10 above
    double tol = 1e-9;
    /// Restrict to the level Phi = beta (ignored when n == 1).
    std::optional<std::vector<double>> beta;
};

CriticalSearch detect_critical_mod_phi(const SystemSpec& spec, const DetectOptions& opts = {});

// ---- prediction and verdict ----------------------------------------------------

enum class Prediction { AllConnected, SomeDisconnected, Inconclusive };

std::string_view to_string(Prediction p);

struct ClassifiedPoint {
    CriticalPoint point;
    singularity::Classification signature;
    singularity::ReducedPointType type;
    bool stabilizer_connected = true;
    bool tall = true;
};

struct PredictionResult {
    Prediction prediction = Prediction::Inconclusive;
    std::vector<ClassifiedPoint> points;
    std::vector<std::string> diagnostics;
    std::optional<int> genus;
};

struct VerdictOptions {
    std::vector<double> levels; // empty: defaults of the system
    std::vector<double> beta;   // empty: defaults of the system
    std::size_t resolution = 0;
    std::size_t detect_resolution = 0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    singularity::ClassifyOptions classify;
    unsigned threads = 0;
};

PredictionResult predict_connectedness(const SystemSpec& spec, const VerdictOptions& opts = {});

struct OracleLevel {
    double level;
    std::size_t components;
    std::size_t marked_cells;
    bool boundary;
};

struct Verdict {
    PredictionResult prediction;
    std::vector<OracleLevel> oracle;
    bool agree = false;
    std::vector<double> beta;
    std::size_t resolution = 0;
};

Verdict verdict(const SystemSpec& spec, const VerdictOptions& opts = {});

/// Human-readable report; the header lists every setting used.
void write_report(std::ostream& out, const SystemSpec& spec, const Verdict& v, const VerdictOptions& opts);
void write_verdict_csv(std::ostream& out, const SystemSpec& spec, const Verdict& v);

} // namespace fibcon::fiber
