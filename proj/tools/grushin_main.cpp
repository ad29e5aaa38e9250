// Command-line front end: every capability of the library as a subcommand
// with deterministic, file-emitting runs. Exit codes: 0 success, 2 usage
// error, 3 domain error, 4 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "grushin/embedding.hpp"
#include "grushin/evolution.hpp"
#include "grushin/format.hpp"
#include "grushin/geodesics.hpp"
#include "grushin/geometry.hpp"
#include "grushin/report_json.hpp"
#include "grushin/spectral.hpp"
#include "grushin/tube.hpp"

namespace {

using namespace grushin;

struct ModelOpts {
    double alpha = 0.0;
    int winded = 0;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* winded_opt = nullptr;

    void attach(CLI::App* cmd) {
        alpha_opt = cmd->add_option("--alpha", alpha,
                                    "exponent of the alpha-Grushin metric diag(1, x^(-2a))");
        winded_opt = cmd->add_option("--winded", winded,
                                     "winding parameter n of the n^2-winded bell");
        alpha_opt->excludes(winded_opt);
        winded_opt->excludes(alpha_opt);
    }
    GrushinModel model() const {
        if (winded_opt->count() > 0) return GrushinModel::winded(winded);
        if (alpha_opt->count() > 0) return GrushinModel::alpha(alpha);
        throw CLI::ValidationError("model", "exactly one of --alpha or --winded is required");
    }
};

struct QuantOpts {
    double c = 0.0;
    bool extrinsic = false;
    CLI::Option* c_opt = nullptr;
    CLI::Option* ex_opt = nullptr;

    void attach(CLI::App* cmd) {
        c_opt = cmd->add_option("--intrinsic-c", c,
                                "intrinsic quantization Delta - c K with curvature coupling c");
        ex_opt = cmd->add_flag("--extrinsic", extrinsic,
                               "extrinsic quantization Delta - K + H^2 of the embedded bell");
        c_opt->excludes(ex_opt);
        ex_opt->excludes(c_opt);
    }
    Quantization quant() const {
        if (ex_opt->count() > 0) return Quantization::extrinsic();
        if (c_opt->count() > 0) return Quantization::intrinsic(c);
        throw CLI::ValidationError("quantization",
                                   "exactly one of --intrinsic-c or --extrinsic is required");
    }
};

EndpointSide parse_side(const std::string& s) {
    if (s == "lower") return EndpointSide::Lower;
    if (s == "upper") return EndpointSide::Upper;
    throw CLI::ValidationError("--endpoint", "must be 'lower' or 'upper'");
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("cannot open output file: " + path);
    out << body;
    if (!out) throw NumericalError("write failed: " + path);
}

void emit(const std::string& out_path, const std::string& body) {
    if (out_path.empty())
        std::cout << body;
    else
        write_text(out_path, body);
}

std::string config_echo;  // reconstructed invocation, stamped into outputs

const std::map<std::string, BoundaryCondition> kBcMap{
    {"dirichlet", BoundaryCondition::Dirichlet}, {"neumann", BoundaryCondition::Neumann}};
const std::map<std::string, Equation> kEqMap{{"heat", Equation::Heat},
                                             {"schrodinger", Equation::Schrodinger}};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Numerical laboratory for the (alpha-)Grushin cylinder: curvature and "
        "effective potentials, isometric bell embeddings, geodesic flow, "
        "limit-point/limit-circle diagnostics of the fiber operators, thin-tube "
        "checks and heat/Schrodinger mode evolution."};
    app.require_subcommand(1);

    config_echo = "grushin";
    for (int i = 1; i < argc; ++i) config_echo += std::string(" ") + argv[i];

    // ---- curvature ---------------------------------------------------------
    auto* curvature = app.add_subcommand(
        "curvature", "Gaussian curvature K, mean curvature H of the bell embedding, "
                     "and the effective potential -K + H^2 at one point");
    static ModelOpts curvature_model;
    curvature_model.attach(curvature);
    static double curvature_x = 1.0;
    curvature->add_option("--x", curvature_x, "evaluation point")->required();
    static std::string curvature_out;
    curvature->add_option("--out", curvature_out, "output file (default: stdout)");
    curvature->callback([] {
        const GrushinModel m = curvature_model.model();
        const CurvatureSample s = curvature_sample(m, curvature_x);
        std::string body = "# " + config_echo + "\n";
        body += "K=" + format_double(s.gauss) + "\n";
        body += "H=" + format_double(s.mean) + "\n";
        body += "V_eff=" + format_double(s.v_eff) + "\n";
        emit(curvature_out, body);
    });

    // ---- embed -------------------------------------------------------------
    auto* embed = app.add_subcommand(
        "embed", "tessellate the isometric surface-of-revolution embedding "
                 "(trumpet bell / winded bell) and export it as OBJ or CSV");
    static ModelOpts embed_model;
    embed_model.attach(embed);
    static double embed_xmin = 1.0, embed_xmax = 3.0;
    static int embed_nx = 50, embed_ny = 64;
    static bool embed_full = false;
    static std::string embed_format = "obj", embed_out;
    embed->add_option("--x-min", embed_xmin, "lower end of the x band")->required();
    embed->add_option("--x-max", embed_xmax, "upper end of the x band")->required();
    embed->add_option("--nx", embed_nx, "samples along x");
    embed->add_option("--ny", embed_ny, "samples along y");
    embed->add_flag("--full-winding", embed_full,
                    "sweep the whole circle (winded bells wrap n^2 times)");
    embed->add_option("--format", embed_format, "obj or csv")
        ->check(CLI::IsMember({"obj", "csv"}));
    embed->add_option("--out", embed_out, "output file")->required();
    embed->callback([] {
        RevolutionProfile profile(embed_model.model());
        const Mesh mesh = generate_mesh(profile, embed_xmin, embed_xmax, embed_nx, embed_ny,
                                        embed_full);
        const std::string body = "# " + config_echo + "\n" +
                                 (embed_format == "obj" ? export_mesh_obj(mesh)
                                                        : export_mesh_csv(mesh));
        write_text(embed_out, body);
    });

    // ---- geodesic ----------------------------------------------------------
    auto* geodesic = app.add_subcommand(
        "geodesic", "integrate one geodesic of the Pontryagin Hamiltonian flow "
                    "and emit the trajectory as CSV t,x,y,px,py");
    static ModelOpts geo_model;
    geo_model.attach(geodesic);
    static double geo_x0 = 0.25, geo_y0 = 0.0, geo_px = 0.0, geo_py = 4.0, geo_T = 1.3;
    static int geo_steps = 10000;
    static std::string geo_out;
    geodesic->add_option("--x0", geo_x0, "initial x")->required();
    geodesic->add_option("--y0", geo_y0, "initial y");
    geodesic->add_option("--px", geo_px, "initial radial momentum")->required();
    geodesic->add_option("--py", geo_py, "initial angular momentum")->required();
    geodesic->add_option("--T", geo_T, "integration time")->required();
    geodesic->add_option("--steps", geo_steps, "fixed integrator steps");
    geodesic->add_option("--out", geo_out, "output CSV")->required();
    geodesic->callback([] {
        const auto traj = geodesic_flow(geo_model.model(), {geo_x0, geo_y0, geo_px, geo_py},
                                        geo_T, geo_steps);
        std::string body = "# " + config_echo + "\nt,x,y,px,py\n";
        for (const auto& s : traj)
            body += format_double(s.t) + ',' + format_double(s.state.x) + ',' +
                    format_double(s.state.y) + ',' + format_double(s.state.px) + ',' +
                    format_double(s.state.py) + '\n';
        write_text(geo_out, body);
    });

    // ---- wavefront ---------------------------------------------------------
    auto* front = app.add_subcommand(
        "wavefront", "endpoints at time T of the unit-energy geodesic family from a "
                     "base point; emits CSV theta,x_end,y_end");
    static ModelOpts front_model;
    front_model.attach(front);
    static double front_x0 = 0.25, front_y0 = 0.0, front_T = 1.3;
    static int front_angles = 256, front_steps = 10000;
    static std::string front_out;
    front->add_option("--x0", front_x0, "base x > 0")->required();
    front->add_option("--y0", front_y0, "base y");
    front->add_option("--T", front_T, "propagation time")->required();
    front->add_option("--angles", front_angles, "number of launch angles");
    front->add_option("--steps", front_steps, "fixed integrator steps");
    front->add_option("--out", front_out, "output CSV")->required();
    front->callback([] {
        const auto pts = wavefront(front_model.model(), front_x0, front_y0, front_T,
                                   front_angles, front_steps);
        std::string body = "# " + config_echo + "\ntheta,x_end,y_end\n";
        for (const auto& p : pts)
            body += format_double(p.theta) + ',' + format_double(p.x) + ',' +
                    format_double(p.y) + '\n';
        write_text(front_out, body);
    });

    // ---- conjugate ---------------------------------------------------------
    auto* conj = app.add_subcommand(
        "conjugate", "first conjugate time along a geodesic (vanishing of the "
                     "position block of the variational flow)");
    static ModelOpts conj_model;
    conj_model.attach(conj);
    static double conj_x0 = 0.25, conj_y0 = 0.0, conj_px = 0.0, conj_py = 4.0, conj_T = 2.0;
    static int conj_steps = 8192;
    static std::string conj_out;
    conj->add_option("--x0", conj_x0, "initial x > 0")->required();
    conj->add_option("--y0", conj_y0, "initial y");
    conj->add_option("--px", conj_px, "initial radial momentum")->required();
    conj->add_option("--py", conj_py, "initial angular momentum")->required();
    conj->add_option("--T-max", conj_T, "search horizon")->required();
    conj->add_option("--steps", conj_steps, "scan resolution");
    conj->add_option("--out", conj_out, "output file (default: stdout)");
    conj->callback([] {
        const auto t = conjugate_time(conj_model.model(), {conj_x0, conj_y0, conj_px, conj_py},
                                      conj_T, conj_steps);
        std::string body = "# " + config_echo + "\n";
        body += "conjugate_time=" + (t ? format_double(*t) : std::string("none")) + "\n";
        emit(conj_out, body);
    });

    // ---- classify ----------------------------------------------------------
    auto* classify = app.add_subcommand(
        "classify", "analytic limit-point / limit-circle classification of one "
                    "endpoint of a fiber operator (JSON)");
    static ModelOpts cls_model;
    static QuantOpts cls_quant;
    cls_model.attach(classify);
    cls_quant.attach(classify);
    static int cls_k = 0;
    static std::string cls_side = "lower", cls_out;
    classify->add_option("--k", cls_k, "Fourier mode");
    classify->add_option("--endpoint", cls_side, "lower or upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    classify->add_option("--out", cls_out, "output file (default: stdout)");
    classify->callback([] {
        const FiberOperator f = make_fiber(cls_model.model(), cls_quant.quant(), cls_k);
        nlohmann::json j = classification_json(f, parse_side(cls_side));
        j["config"] = config_echo;
        emit(cls_out, j.dump(2) + "\n");
    });

    // ---- weyl --------------------------------------------------------------
    auto* weyl = app.add_subcommand(
        "weyl", "numerical Weyl alternative: square-integrability masses of two "
                "independent solutions of (-d^2/dx^2 + V_k - i)u = 0 toward an "
                "endpoint (JSON)");
    static ModelOpts weyl_model;
    static QuantOpts weyl_quant;
    weyl_model.attach(weyl);
    weyl_quant.attach(weyl);
    static int weyl_k = 0;
    static std::string weyl_side = "lower", weyl_out;
    static std::vector<double> weyl_cutoffs;
    static double weyl_anchor = std::numeric_limits<double>::quiet_NaN();
    weyl->add_option("--k", weyl_k, "Fourier mode");
    weyl->add_option("--endpoint", weyl_side, "lower or upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    weyl->add_option("--cutoffs", weyl_cutoffs,
                     "distances to a finite endpoint (decreasing) or positions toward "
                     "infinity (increasing)")
        ->required()
        ->delimiter(',');
    weyl->add_option("--anchor", weyl_anchor, "interior anchor (default: mid-interval)");
    weyl->add_option("--out", weyl_out, "output file (default: stdout)");
    weyl->callback([] {
        const FiberOperator f = make_fiber(weyl_model.model(), weyl_quant.quant(), weyl_k);
        std::optional<double> anchor;
        if (std::isfinite(weyl_anchor)) anchor = weyl_anchor;
        const WeylEvidence ev =
            weyl_numerical_check(f, parse_side(weyl_side), weyl_cutoffs, anchor);
        nlohmann::json j = weyl_evidence_json(f, parse_side(weyl_side), ev);
        j["config"] = config_echo;
        emit(weyl_out, j.dump(2) + "\n");
    });

    // ---- deficiency --------------------------------------------------------
    auto* defc = app.add_subcommand(
        "deficiency", "endpoint classes and deficiency-index contributions of every "
                      "Fourier mode in a range (JSON)");
    static ModelOpts def_model;
    static QuantOpts def_quant;
    def_model.attach(defc);
    def_quant.attach(defc);
    static int def_kmin = -5, def_kmax = 5;
    static std::string def_out;
    defc->add_option("--k-min", def_kmin, "lowest Fourier mode");
    defc->add_option("--k-max", def_kmax, "highest Fourier mode");
    defc->add_option("--out", def_out, "output file (default: stdout)");
    defc->callback([] {
        const GrushinModel m = def_model.model();
        const Quantization q = def_quant.quant();
        const DeficiencyReport rep = deficiency_report(m, q, def_kmin, def_kmax);
        nlohmann::json j = deficiency_report_json(m, q, def_kmin, def_kmax, rep);
        j["config"] = config_echo;
        emit(def_out, j.dump(2) + "\n");
    });

    // ---- tube-check --------------------------------------------------------
    auto* tube = app.add_subcommand(
        "tube-check", "thin-tube verification: shifted Rayleigh quotients of the tube "
                      "Laplacian against the extrinsic quotient over a list of "
                      "half-thicknesses; emits CSV epsilon,q_shifted,target,error,ratio");
    static ModelOpts tube_model;
    tube_model.attach(tube);
    static double tube_xmin = 1.5, tube_xmax = 3.0;
    static int tube_k = 0, tube_quad = 64;
    static std::vector<double> tube_eps;
    static std::string tube_out;
    tube->add_option("--x-min", tube_xmin, "lower end of the band")->required();
    tube->add_option("--x-max", tube_xmax, "upper end of the band")->required();
    tube->add_option("--k", tube_k, "angular mode of the trial state");
    tube->add_option("--eps", tube_eps, "decreasing tube half-thicknesses")
        ->required()
        ->delimiter(',');
    tube->add_option("--quad", tube_quad, "Gauss-Legendre nodes per axis");
    tube->add_option("--out", tube_out, "output CSV")->required();
    tube->callback([] {
        const GrushinModel m = tube_model.model();
        const TestFunction psi = TestFunction::spanning(tube_xmin, tube_xmax);
        const auto rows = convergence_study(m, tube_xmin, tube_xmax, tube_k, psi, tube_eps,
                                            tube_quad);
        std::string body = "# " + config_echo + "\nepsilon,q_shifted,target,error,ratio\n";
        for (const auto& r : rows)
            body += format_double(r.epsilon) + ',' + format_double(r.q_shifted) + ',' +
                    format_double(r.target) + ',' + format_double(r.error) + ',' +
                    format_double(r.ratio) + '\n';
        write_text(tube_out, body);
    });

    // ---- evolve ------------------------------------------------------------
    auto* evo = app.add_subcommand(
        "evolve", "heat or Schrodinger evolution of one fiber on a truncated interval "
                  "(Crank-Nicolson); emits snapshot CSV with a time header row");
    static ModelOpts evo_model;
    static QuantOpts evo_quant;
    evo_model.attach(evo);
    evo_quant.attach(evo);
    static int evo_k = 0, evo_n = 512, evo_save = 10;
    static double evo_xmin = 0.1, evo_xmax = 5.0, evo_T = 0.1, evo_dt = 0.0;
    static double evo_center = std::numeric_limits<double>::quiet_NaN(), evo_width = 0.1;
    static std::string evo_eq = "heat", evo_bc_lo = "dirichlet", evo_bc_hi = "dirichlet";
    static std::string evo_out;
    evo->add_option("--k", evo_k, "Fourier mode");
    evo->add_option("--x-min", evo_xmin, "lower truncation")->required();
    evo->add_option("--x-max", evo_xmax, "upper truncation")->required();
    evo->add_option("--n", evo_n, "grid points");
    evo->add_option("--bc-lower", evo_bc_lo, "dirichlet or neumann")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));
    evo->add_option("--bc-upper", evo_bc_hi, "dirichlet or neumann")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));
    evo->add_option("--equation", evo_eq, "heat or schrodinger")
        ->check(CLI::IsMember({"heat", "schrodinger"}));
    evo->add_option("--T", evo_T, "final time")->required();
    evo->add_option("--dt", evo_dt, "time step (default: grid spacing)");
    evo->add_option("--save-every", evo_save, "snapshot cadence in steps");
    evo->add_option("--probe-center", evo_center, "Gaussian initial datum center");
    evo->add_option("--probe-width", evo_width, "Gaussian initial datum width");
    evo->add_option("--out", evo_out, "output CSV")->required();
    evo->callback([] {
        const FiberOperator f = make_fiber(evo_model.model(), evo_quant.quant(), evo_k);
        const DiscreteOperator op = discretize(f, evo_xmin, evo_xmax, evo_n,
                                               kBcMap.at(evo_bc_lo), kBcMap.at(evo_bc_hi));
        const double center = std::isfinite(evo_center) ? evo_center
                                                        : 0.5 * (evo_xmin + evo_xmax);
        std::vector<std::complex<double>> u(op.grid.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = op.grid[i];
            u[i] = std::exp(-0.5 * (x - center) * (x - center) / (evo_width * evo_width));
        }
        const double norm = weighted_norm(op.mass, u);
        for (auto& v : u) v /= norm;
        const double dt = evo_dt > 0.0 ? evo_dt : op.dx;
        const Equation eq = kEqMap.at(evo_eq);
        const ModeSolution sol = evolve(op, eq, std::move(u), evo_T, dt, evo_save);

        std::string body = "# " + config_echo + "\nt";
        for (const auto& [t, snap] : sol.snapshots) body += ',' + format_double(t);
        body += '\n';
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            body += format_double(sol.grid[i]);
            for (const auto& [t, snap] : sol.snapshots) {
                const double v = eq == Equation::Heat ? snap[i].real() : std::abs(snap[i]);
                body += ',' + format_double(v);
            }
            body += '\n';
        }
        write_text(evo_out, body);
    });

    // ---- bc-sensitivity ----------------------------------------------------
    auto* bcs = app.add_subcommand(
        "bc-sensitivity", "Dirichlet-vs-Neumann sensitivity of the evolution at a "
                          "singular endpoint across shrinking cutoffs; emits CSV "
                          "delta,sensitivity_dirichlet_vs_neumann");
    static ModelOpts bcs_model;
    static QuantOpts bcs_quant;
    bcs_model.attach(bcs);
    bcs_quant.attach(bcs);
    static int bcs_k = 0, bcs_refine = 1;
    static std::string bcs_side = "lower", bcs_eq = "heat", bcs_out;
    static std::vector<double> bcs_deltas;
    static SensitivityProtocol bcs_proto;
    bcs->add_option("--k", bcs_k, "Fourier mode");
    bcs->add_option("--endpoint", bcs_side, "lower or upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    bcs->add_option("--deltas", bcs_deltas, "decreasing cutoff distances")
        ->required()
        ->delimiter(',');
    bcs->add_option("--T", bcs_proto.T, "evolution time");
    bcs->add_option("--dx", bcs_proto.dx, "grid spacing (dt = dx)");
    bcs->add_option("--far", bcs_proto.far_position, "regular-end truncation");
    bcs->add_option("--equation", bcs_eq, "heat or schrodinger")
        ->check(CLI::IsMember({"heat", "schrodinger"}));
    bcs->add_option("--probe-center", bcs_proto.probe_center, "probe center");
    bcs->add_option("--probe-width", bcs_proto.probe_width, "probe width");
    bcs->add_option("--refine", bcs_refine, "2 halves dx and dt");
    bcs->add_option("--out", bcs_out, "output CSV")->required();
    bcs->callback([] {
        const FiberOperator f = make_fiber(bcs_model.model(), bcs_quant.quant(), bcs_k);
        bcs_proto.equation = kEqMap.at(bcs_eq);
        bcs_proto.refinement = bcs_refine;
        const auto rows = bc_sensitivity(f, parse_side(bcs_side), bcs_deltas, bcs_proto);
        std::string body = "# " + config_echo + "\ndelta,sensitivity_dirichlet_vs_neumann\n";
        for (const auto& r : rows)
            body += format_double(r.delta) + ',' + format_double(r.sensitivity) + '\n';
        write_text(bcs_out, body);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const grushin::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const grushin::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
