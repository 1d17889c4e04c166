#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "spinqrf/errors.hpp"
#include "spinqrf/qrf.hpp"
#include "spinqrf/random.hpp"
#include "spinqrf/state_file.hpp"
#include "spinqrf/symmetry.hpp"

namespace spinqrf::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct GlobalOptions {
    std::string format = "json";
    std::uint64_t seed = 0;
    bool quiet = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Re-indents a multi-line JSON value for nesting under a key.
std::string nested(const std::string& text, int indent) {
    std::string out;
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        out += first ? line : "\n" + pad + line;
        first = false;
    }
    return out;
}

std::string vec_text(const Vec3& v) {
    return "(" + format_number(v.x()) + ", " + format_number(v.y()) + ", " +
           format_number(v.z()) + ")";
}

void write_state_text(std::ostream& out, const std::string& title, const BranchState& s) {
    out << title << " (perspective " << s.perspective << ", described " << s.described << ")\n";
    for (std::size_t i = 0; i < s.branches.size(); ++i) {
        const Branch& b = s.branches[i];
        out << "  branch " << i << ": amp (" << format_number(b.amplitude.real()) << ", "
            << format_number(b.amplitude.imag()) << ")\n";
        for (int k = 0; k < 3; ++k) {
            out << "    " << s.described << (k + 1) << " " << vec_text(b.frame.axis(k)) << "\n";
        }
        if (b.system.is_label()) {
            const auto& l = b.system.as_label();
            out << "    B n=" << vec_text(l.n) << " m=" << format_number(l.m)
                << " s=" << format_spin(l.s) << "\n";
        } else {
            const auto& v = b.system.as_vector();
            out << "    B s=" << format_spin(v.spin()) << " amps";
            for (int k = 0; k < v.dim(); ++k) {
                out << " (" << format_number(v.amplitude(k).real()) << ", "
                    << format_number(v.amplitude(k).imag()) << ")";
            }
            out << "\n";
        }
    }
}

struct ExampleParams {
    double theta = 0.7;
    double phi = 0.4;
    double big_phi = 0.9;
    double alpha = 0.5;
    double beta = 1.1;
    double gamma = -0.8;
};

const SpinQuantumNumber kHalf(1);

BranchState example_state(const std::string& name, const ExampleParams& p) {
    const Vec3 n = direction(p.theta, p.phi);
    const Frame canonical = Frame::canonical();
    const Frame swapped(Vec3::UnitX(), Vec3::UnitZ(), Vec3::UnitY());
    const double r = 1.0 / std::sqrt(2.0);
    BranchState s;
    if (name == "a") {
        const auto m = compose_proper(EulerAngles{p.alpha, p.beta, p.gamma});
        s.branches.push_back(
            Branch{1.0, Frame::from_rows(m.matrix()), SystemB::label(n, 0.5, kHalf)});
    } else if (name == "b") {
        s.branches.push_back(Branch{r, canonical, SystemB::label(n, 0.5, kHalf)});
        s.branches.push_back(
            Branch{std::polar(r, p.big_phi), swapped, SystemB::label(n, 0.5, kHalf)});
    } else if (name == "c") {
        s.branches.push_back(Branch{r, canonical, SystemB::label(Vec3::UnitZ(), 0.5, kHalf)});
        s.branches.push_back(
            Branch{std::polar(r, p.big_phi), swapped, SystemB::label(Vec3::UnitY(), 0.5, kHalf)});
    } else {
        throw InputError("unknown example '" + name + "' (expected a, b or c)");
    }
    return s;
}

int cmd_example(const std::string& name, const ExampleParams& p, const GlobalOptions& g,
                std::ostream& out) {
    const BranchState in = example_state(name, p);
    const BranchState transformed = branch_transform(in);
    const double before = entanglement_diagnostic(in);
    const double after = entanglement_diagnostic(transformed);

    if (g.format == "text") {
        out << "example " << name << "\n";
        write_state_text(out, "input", in);
        for (std::size_t i = 0; i < in.branches.size(); ++i) {
            const auto e = euler_from_frame(in.branches[i].frame);
            out << "euler angles branch " << i << ": alpha=" << format_number(e.alpha)
                << " beta=" << format_number(e.beta) << " gamma=" << format_number(e.gamma)
                << " chirality=" << in.branches[i].frame.chirality() << "\n";
        }
        write_state_text(out, "output", transformed);
        out << "entanglement before=" << format_number(before)
            << " after=" << format_number(after) << "\n";
        return kOk;
    }

    out << "{\n";
    out << "  \"example\": \"" << name << "\",\n";
    out << "  \"parameters\": {\"theta\": " << format_number(p.theta)
        << ", \"phi\": " << format_number(p.phi) << ", \"Phi\": " << format_number(p.big_phi)
        << ", \"alpha\": " << format_number(p.alpha) << ", \"beta\": " << format_number(p.beta)
        << ", \"gamma\": " << format_number(p.gamma) << "},\n";
    out << "  \"euler_angles\": [";
    for (std::size_t i = 0; i < in.branches.size(); ++i) {
        const auto e = euler_from_frame(in.branches[i].frame);
        out << (i ? ", " : "") << "[" << format_number(e.alpha) << ", " << format_number(e.beta)
            << ", " << format_number(e.gamma) << "]";
    }
    out << "],\n";
    out << "  \"entanglement\": {\"before\": " << format_number(before)
        << ", \"after\": " << format_number(after) << "},\n";
    out << "  \"input\": " << nested(serialize_state_file(StateFile{std::nullopt, in, {}}), 2)
        << ",\n";
    out << "  \"output\": "
        << nested(serialize_state_file(StateFile{std::nullopt, transformed, {}}), 2) << "\n";
    out << "}\n";
    return kOk;
}

int cmd_transform(const std::string& in_path, const std::string& out_path,
                  std::optional<double> finite_j, const GlobalOptions& g, std::ostream& out,
                  std::ostream& err) {
    std::vector<std::string> warnings;
    StateFile file = parse_state_file(read_file(in_path), &warnings);
    if (!g.quiet) {
        for (const auto& w : warnings) err << "warning: " << w << "\n";
    }

    StateFile result{file.j, branch_transform(file.state), std::nullopt};

    std::optional<SpinQuantumNumber> j;
    if (finite_j) {
        j = SpinQuantumNumber::from_value(*finite_j);
    } else if (file.j) {
        j = file.j;
    }
    if (j) {
        if (j->twice() < 1) throw InputError("--finite-j must be at least 1/2");
        for (const auto& b : file.state.branches) {
            if (b.frame.chirality() < 0) {
                throw UnsupportedError(
                    "finite-j transformation has no reflection; left-handed branches are "
                    "supported in the branch-exact mode only");
            }
        }
        const auto s = file.state.branches.front().system.spin();
        const CVector joint = realize_finite_j(file.state, *j);
        const CVector moved = u_transform_finite_j(joint, euler_angle_operators(*j), s);
        const CMatrix rho_finite = reduce_to_last(moved, s.dim());
        const CMatrix rho_exact = idealized_b_state(result.state);
        result.finite_j = FiniteJReport{*j, fidelity(rho_exact, rho_finite)};
    }

    std::ofstream o(out_path, std::ios::binary);
    if (!o) throw InputError("cannot write " + out_path);
    o << serialize_state_file(result);
    o.close();
    if (!o) throw InputError("failed writing " + out_path);

    if (!g.quiet) {
        if (g.format == "text") {
            out << "transformed " << file.state.branches.size() << " branch(es) -> "
                << result.state.branches.size() << " branch(es), written to " << out_path
                << "\n";
            if (result.finite_j) {
                out << "finite j=" << format_spin(result.finite_j->j)
                    << " B fidelity=" << format_number(result.finite_j->b_fidelity) << "\n";
            }
        } else {
            out << "{\"input_branches\": " << file.state.branches.size()
                << ", \"output_branches\": " << result.state.branches.size();
            if (result.finite_j) {
                out << ", \"finite_j\": " << format_spin(result.finite_j->j)
                    << ", \"b_fidelity\": " << format_number(result.finite_j->b_fidelity);
            }
            out << "}\n";
        }
    }
    return kOk;
}

std::vector<SpinQuantumNumber> parse_j_list(const std::string& text) {
    std::vector<SpinQuantumNumber> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InputError("--j: cannot parse '" + item + "'");
        }
        if (used != item.size()) throw InputError("--j: cannot parse '" + item + "'");
        const auto j = SpinQuantumNumber::from_value(v);
        if (j.twice() < 1) throw InputError("--j: values must be at least 1/2");
        out.push_back(j);
    }
    if (out.empty()) throw InputError("--j: empty list");
    return out;
}

Frame default_converge_frame() { return Frame(Vec3::UnitX(), Vec3::UnitZ(), -Vec3::UnitY()); }

int cmd_converge(const std::string& j_list, double theta, double phi,
                 const std::string& frame_path, std::ostream& out) {
    const auto js = parse_j_list(j_list);
    const Frame frame =
        frame_path.empty() ? default_converge_frame() : parse_frame_document(read_file(frame_path));
    const auto table = convergence_study(frame, theta, phi, js);
    out << "j,alpha_err,beta_err,gamma_err,cos_op_err,b_fidelity\n";
    for (const auto& r : table.rows) {
        out << format_spin(r.j) << "," << format_number(r.alpha_err) << ","
            << format_number(r.beta_err) << "," << format_number(r.gamma_err) << ","
            << format_number(r.cos_op_err) << "," << format_number(r.b_fidelity) << "\n";
    }
    return kOk;
}

Frame random_frame(SplitMix64& rng) {
    for (;;) {
        Frame f = Frame::from_rows(rng.rotation());
        if (!is_gimbal_locked(f)) return f;
    }
}

int cmd_symmetry(double j_value, double s_value, int trials, bool break_invariance,
                 const GlobalOptions& g, std::ostream& out) {
    const auto j = SpinQuantumNumber::from_value(j_value);
    const auto s = SpinQuantumNumber::from_value(s_value);
    if (trials < 0) throw InputError("--trials must be non-negative");

    JointHamiltonian h = heisenberg_like_hamiltonian(j, s, {1.0, 0.5, 0.25});
    if (break_invariance) {
        const auto field = b_field_hamiltonian(j, s, Vec3::UnitZ());
        h = JointHamiltonian{HermitianOperator(h.op.matrix() + field.op.matrix()), j, s};
    }

    SplitMix64 rng(g.seed);
    double rotation_dev = 0.0;
    double qrf_dev = 0.0;
    int rejected = 0;
    for (int t = 0; t < trials; ++t) {
        const Vec3 axis = rng.unit_vector();
        const double angle = rng.uniform(0.0, kPi);
        rotation_dev = std::max(rotation_dev,
                                check_rotational_invariance(h, common_rotation(j, s, axis, angle)));

        const Frame ket = random_frame(rng);
        const Frame bra = random_frame(rng);
        const SpinState ket_b = scs(s, rng.unit_vector());
        const SpinState bra_b = scs(s, rng.unit_vector());
        try {
            qrf_dev = std::max(qrf_dev, check_qrf_invariance(h, ket, bra, ket_b, bra_b).deviation());
        } catch (const VerificationError& e) {
            ++rejected;
            qrf_dev = std::max(qrf_dev, e.deviation());
        }
    }
    const bool passed =
        rotation_dev < kInvarianceTolerance && qrf_dev < kInvarianceTolerance && rejected == 0;

    if (g.format == "text") {
        out << "symmetry j=" << format_spin(j) << " s=" << format_spin(s) << " trials=" << trials
            << " seed=" << g.seed << "\n";
        out << "max rotational deviation " << format_number(rotation_dev) << "\n";
        out << "max qrf matrix-element deviation " << format_number(qrf_dev) << "\n";
        out << "rejected " << rejected << "\n";
        out << (passed ? "PASS" : "FAIL") << "\n";
    } else {
        out << "{\"j\": " << format_spin(j) << ", \"s\": " << format_spin(s)
            << ", \"trials\": " << trials << ", \"seed\": " << g.seed
            << ", \"max_rotation_deviation\": " << format_number(rotation_dev)
            << ", \"max_qrf_deviation\": " << format_number(qrf_dev)
            << ", \"rejected\": " << rejected << ", \"passed\": " << (passed ? "true" : "false")
            << "}\n";
    }
    return passed ? kOk : kVerificationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spin quantum reference frame transformations"};
    app.name("qrfspin");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--seed", g.seed, "Seed for randomized trials");
    app.add_flag("--quiet", g.quiet, "Suppress warnings and summaries");

    auto* transform = app.add_subcommand("transform", "Change perspective of a state file");
    std::string in_path, out_path;
    std::optional<double> finite_j;
    transform->add_option("input", in_path, "Input state file")->required();
    transform->add_option("output", out_path, "Output state file")->required();
    transform->add_option("--finite-j", finite_j,
                          "Also report B fidelity of the finite-j operator transformation");

    auto* example = app.add_subcommand("example", "Reproduce a worked example (a, b or c)");
    std::string example_name;
    ExampleParams params;
    example->add_option("name", example_name, "a, b or c")->required();
    example->add_option("--theta", params.theta, "Polar angle of B");
    example->add_option("--phi", params.phi, "Azimuth of B");
    example->add_option("--Phi", params.big_phi, "Relative phase of the second branch");
    example->add_option("--alpha", params.alpha, "Euler angle alpha of A (example a)");
    example->add_option("--beta", params.beta, "Euler angle beta of A (example a)");
    example->add_option("--gamma", params.gamma, "Euler angle gamma of A (example a)");

    auto* converge = app.add_subcommand("converge", "Finite-j convergence table (CSV)");
    std::string j_list = "5,10,20";
    double theta = kPi / 3.0, phi = kPi / 4.0;
    std::string frame_path;
    converge->add_option("--j", j_list, "Comma-separated spin values");
    converge->add_option("--theta", theta, "Polar angle of B and of the cosine-operator test state");
    converge->add_option("--phi", phi, "Azimuth of B");
    converge->add_option("--frame", frame_path, "JSON file holding the frame of A");

    auto* symmetry = app.add_subcommand("symmetry", "Hamiltonian invariance report");
    double sym_j = 1.0, sym_s = 0.5;
    int trials = 100;
    bool break_invariance = false;
    symmetry->add_option("--j", sym_j, "Spin of each frame constituent");
    symmetry->add_option("--s", sym_s, "Spin of B");
    symmetry->add_option("--trials", trials, "Number of random trials");
    symmetry->add_flag("--break-invariance", break_invariance)->group("");

    std::vector<std::string> storage{"qrfspin"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*transform) return cmd_transform(in_path, out_path, finite_j, g, out, err);
        if (*example) return cmd_example(example_name, params, g, out);
        if (*converge) return cmd_converge(j_list, theta, phi, frame_path, out);
        if (*symmetry) return cmd_symmetry(sym_j, sym_s, trials, break_invariance, g, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const VerificationError& e) {
        err << "error: " << e.what() << "\n";
        return kVerificationFailure;
    }
    return kInputError;
}

}  // namespace spinqrf::cli
