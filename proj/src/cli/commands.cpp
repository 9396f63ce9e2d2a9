#include "cli/commands.hpp"
#include "ccrystal/analysis.hpp"
#include "ccrystal/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <exception>
#include <fstream>
#include <map>
#include <thread>

namespace ccrystal::cli {

namespace fs = std::filesystem;
using cd = std::complex<double>;
using nlohmann::json;

std::string file_banner(const RunConfig& config)
{
    return fmt::format("# ccrystal {} config={:016x}", kVersion, config.hash());
}

namespace {

class Output {
public:
    Output(const RunConfig& config, const std::string& name, std::ostream& log)
        : path_(fs::path(config.out) / name), log_(log)
    {
        fs::create_directories(config.out);
        file_.open(path_, std::ios::binary | std::ios::trunc);
        if (!file_)
            throw ValidationError(fmt::format("output: cannot open {}", path_.string()));
        if (path_.extension() == ".csv")
            file_ << file_banner(config) << '\n';
    }
    ~Output() { log_ << "wrote " << path_.string() << '\n'; }

    template <typename... Args>
    void row(fmt::format_string<Args...> f, Args&&... args)
    {
        file_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
    }
    std::ofstream& stream() { return file_; }

private:
    fs::path path_;
    std::ofstream file_;
    std::ostream& log_;
};

void write_json(const RunConfig& config, const std::string& name, json body, std::ostream& log)
{
    body["ccrystal"] = kVersion;
    body["config"] = fmt::format("{:016x}", config.hash());
    Output out(config, name, log);
    out.stream() << body.dump(2) << '\n';
}

void write_field(const RunConfig& config, const std::string& name, const ComplexField& f, std::ostream& log)
{
    Output out(config, name, log);
    out.row("x,re,im");
    const double half = config.window * f.grid.period();
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = f.grid.x(j);
        if (std::abs(x) <= half)
            out.row("{:.10g},{:.12g},{:.12g}", x, f[j].real(), f[j].imag());
    }
}

double pt_asymmetry(const ComplexField& v)
{
    double worst = 0.0;
    for (std::size_t j = 1; j < v.size(); ++j)
        worst = std::max(worst, std::abs(v[v.grid.mirror(j)] - std::conj(v[j])));
    return worst;
}

ComplexField select_potential(const std::string& name, const BandEdgeData& bands, const RunConfig& config)
{
    if (name == "v0")
        return bands.reference_field();
    if (name == "v1")
        return synth_v1(bands);
    if (name == "v3") {
        config.synthesis.validate();
        return synth_v3(bands, config.synthesis.lambda);
    }
    ComplexField v2 = synth_v2(bands, config.synthesis.gamma);
    if (name == "re_v2")
        return {v2.grid, v2.values.real().cast<cd>()};
    return v2;
}

struct Run {
    std::string name;
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<Eigen::ArrayXd> rows;
    std::optional<WavePacket> final_state;
    std::exception_ptr error;
};

} // namespace

void cmd_band(const RunConfig& config, std::ostream& log)
{
    config.validate();
    const LatticeSpec& spec = config.lattice;
    const std::vector<double> edges = band_edge_energies(spec, config.harmonics);
    const std::vector<double> roots = discriminant_band_edges(spec, edges.size());
    {
        Output out(config, "band_edges.csv", log);
        out.row("index,energy,discriminant_energy,shifted_energy");
        for (std::size_t i = 0; i < edges.size(); ++i)
            out.row("{},{:.12g},{},{:.12g}", i, edges[i], i < roots.size() ? fmt::format("{:.12g}", roots[i]) : "",
                    edges[i] - edges[0]);
    }
    {
        Output out(config, "dispersion.csv", log);
        out.row("band,k,energy");
        const double zone = std::numbers::pi / spec.period;
        std::vector<double> ks;
        for (int i = 0; i <= 64; ++i)
            ks.push_back(-zone + 2.0 * zone * i / 64.0);
        for (int b = 0; b < 5; ++b)
            for (const auto& [k, e] : dispersion(spec, b, ks, config.harmonics))
                out.row("{},{:.10g},{:.12g}", b, k, e);
    }
    {
        const BandEdgeData bands = band_edge_solutions(spec, Grid1D(spec.period, 4, 512), config.harmonics);
        Output out(config, "band_edge_profiles.csv", log);
        out.row("x,u1,u2,psi2");
        for (std::size_t j = 0; j < bands.grid.points(); ++j) {
            const double x = bands.grid.x(j);
            const auto i = static_cast<Eigen::Index>(j);
            out.row("{:.10g},{:.12g},{:.12g},{:.12g}", x, bands.u1(i), bands.u2(i),
                    bands.u2(i) + x / spec.period * bands.u1(i));
        }
    }
}

void cmd_synth(const RunConfig& config, std::ostream& log)
{
    config.validate();
    config.synthesis.validate();
    const Grid1D grid = config.grid();
    const BandEdgeData bands = band_edge_solutions(config.lattice, grid, config.harmonics);
    const double gamma = config.synthesis.gamma;
    const cd lambda = config.synthesis.lambda;

    const ComplexField v0 = bands.reference_field();
    const ComplexField v1 = synth_v1(bands);
    const ComplexField v2 = synth_v2(bands, gamma);
    const ComplexField v3 = synth_v3(bands, lambda);
    write_field(config, "v1.csv", v1, log);
    write_field(config, "v2.csv", v2, log);
    write_field(config, "v3.csv", v3, log);

    const ComplexField fb3 = bound_state_v3(bands, lambda);
    std::optional<ComplexField> fb2;
    if (gamma != 0.0)
        fb2 = bound_state_v2(bands, gamma);
    {
        Output out(config, "bound_states.csv", log);
        out.row("x,fb2_re,fb2_im,fb3_re,fb3_im");
        const double half = config.window * grid.period();
        for (std::size_t j = 0; j < grid.points(); ++j) {
            const double x = grid.x(j);
            if (std::abs(x) > half)
                continue;
            const cd b2 = fb2 ? (*fb2)[j] : cd{};
            out.row("{:.10g},{:.12g},{:.12g},{:.12g},{:.12g}", x, b2.real(), b2.imag(), fb3[j].real(), fb3[j].imag());
        }
    }

    const ComplexField w = superpotential(ComplexField(grid, bands.u1.cast<cd>(), bands.u1_d1.cast<cd>(),
                                                       bands.u1_d2.cast<cd>()));
    json r;
    r["factorization_energy"] = bands.factorization_energy;
    r["edge_energies"] = bands.edge_energies;
    r["riccati_residual"] = (riccati_potential(w).values - v0.values).abs().maxCoeff();
    r["v1_forms_disagreement"] = v1_forms(bands).max_disagreement();
    r["v2_pt_asymmetry"] = pt_asymmetry(v2);
    r["v2_max_abs_imag"] = v2.values.imag().abs().maxCoeff();
    r["v3_max_abs_imag"] = v3.values.imag().abs().maxCoeff();
    r["v2_bound_state_residual"] = fb2 ? json(eigen_residual_l2(*fb2, v2, 0.0)) : json(nullptr);
    r["v3_bound_state_residual"] = eigen_residual_l2(fb3, v3, 0.0);
    json decay = json::array();
    for (double d : {25.0, 50.0, 100.0}) {
        if ((d + 1.0) * grid.period() > 0.5 * grid.length())
            continue;
        const ComplexField d2{grid, v2.values - v1.values};
        const ComplexField d3{grid, v3.values - v0.values};
        decay.push_back({{"distance_periods", d},
                         {"v2_minus_v1", sup_at_distance(d2, d * grid.period())},
                         {"v3_minus_v0", sup_at_distance(d3, d * grid.period())}});
    }
    r["defect_decay"] = decay;
    write_json(config, "synth_residuals.json", r, log);
}

void cmd_propagate(const RunConfig& config, bool snapshots, std::ostream& log)
{
    config.validate();
    std::vector<std::string> names = config.potentials;
    if (names.empty())
        names = snapshots ? std::vector<std::string>{"v2"} : std::vector<std::string>{"v1", "v2", "re_v2"};
    if (!snapshots && names.size() < 2)
        throw ValidationError("config: potential: compare needs a reference and at least one test potential");
    if (names.size() >= 2 && names.front() != "v0" && names.front() != "v1")
        throw ValidationError("config: potential: the first (reference) potential of a comparison must be the "
                              "periodic v0 or v1");

    const Grid1D grid = config.grid();
    const BandEdgeData bands = band_edge_solutions(config.lattice, grid, config.harmonics);
    const WavePacket psi0 = gaussian_packet(grid, config.x0, config.w, config.k0);
    std::map<std::string, ComplexField> potentials;
    for (const std::string& n : names)
        if (!potentials.contains(n))
            potentials.emplace(n, select_potential(n, bands, config));

    const std::size_t stride_x = std::max<std::size_t>(1, grid.points() / static_cast<std::size_t>(config.max_columns));
    std::vector<Run> runs(names.size());
    {
        std::vector<std::jthread> workers;
        for (std::size_t i = 0; i < names.size(); ++i) {
            runs[i].name = names[i];
            workers.emplace_back([&, i] {
                Run& run = runs[i];
                try {
                    run.final_state = propagate(psi0, potentials.at(run.name), config.propagation,
                                                [&](const WavePacket& p) {
                                                    run.times.push_back(p.time);
                                                    run.norms.push_back(p.norm() / psi0.norm());
                                                    if (!snapshots)
                                                        return;
                                                    Eigen::ArrayXd row(static_cast<Eigen::Index>(grid.points() / stride_x));
                                                    for (Eigen::Index c = 0; c < row.size(); ++c)
                                                        row(c) = std::abs(p.amplitudes(c * static_cast<Eigen::Index>(stride_x)));
                                                    run.rows.push_back(std::move(row));
                                                });
                } catch (...) {
                    run.error = std::current_exception();
                }
            });
        }
    }
    for (const Run& run : runs) {
        if (!run.error)
            continue;
        try {
            std::rethrow_exception(run.error);
        } catch (const BoundaryGuardError& e) {
            throw BoundaryGuardError(fmt::format("{} [{}]: retry with --domain-periods {} --grid-points {}", e.what(),
                                                 run.name, 2 * config.domain_periods, 2 * config.grid_points));
        }
    }

    for (const Run& run : runs) {
        if (snapshots) {
            Output out(config, fmt::format("snapshots_{}.csv", run.name), log);
            std::string header = "t";
            for (std::size_t c = 0; c < grid.points() / stride_x; ++c)
                header += fmt::format(",{:.8g}", grid.x(c * stride_x));
            out.stream() << header << '\n';
            for (std::size_t s = 0; s < run.rows.size(); ++s) {
                std::string line = fmt::format("{:.8g}", run.times[s]);
                for (double a : run.rows[s])
                    line += fmt::format(",{:.6e}", a);
                out.stream() << line << '\n';
            }
        }
        Output out(config, fmt::format("norms_{}.csv", run.name), log);
        out.row("t,norm");
        for (std::size_t s = 0; s < run.times.size(); ++s)
            out.row("{:.8g},{:.15g}", run.times[s], run.norms[s]);
    }

    if (runs.size() < 2)
        return;
    const Run& ref = runs.front();
    const BlochBasis basis(potentials.at(ref.name));
    const auto weights = band_weights(psi0, BlochBasis(bands.reference_field()), 4);
    const LatticeSpec shifted = with_lowest_edge_at_zero(config.lattice, config.harmonics);
    const double vg = group_velocity(shifted, config.band, config.k0, config.harmonics);
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const Run& test = runs[i];
        InvisibilityReport r = assess_invisibility(*ref.final_state, *test.final_state, basis, config.band,
                                                   config.cut, vg);
        r.band_weights = weights;
        for (std::size_t s = 0; s < test.times.size(); ++s)
            r.norms_over_time.emplace_back(test.times[s], test.norms[s]);

        json j;
        j["reference"] = ref.name;
        j["test"] = test.name;
        j["time"] = test.final_state->time;
        j["band"] = r.band;
        j["cut"] = r.cut;
        j["fidelity"] = r.fidelity;
        j["raw_fidelity"] = r.raw_fidelity;
        j["reflected_fraction"] = r.reflected_fraction;
        j["reference_reflected_fraction"] = r.reference_reflected_fraction;
        j["raw_reflected_fraction"] = r.raw_reflected_fraction;
        j["transit_delay"] = std::isfinite(r.transit_delay) ? json(r.transit_delay) : json(nullptr);
        j["group_velocity"] = r.group_velocity;
        j["thresholds"] = {{"min_fidelity", r.thresholds.min_fidelity},
                           {"max_reflected_fraction", r.thresholds.max_reflected_fraction},
                           {"max_delay", r.thresholds.max_delay}};
        j["checks"] = {{"fidelity", r.fidelity_ok()}, {"reflection", r.reflection_ok()}, {"delay", r.delay_ok()}};
        j["invisible"] = r.invisible();
        json bw = json::array();
        for (const auto& [b, wgt] : r.band_weights)
            bw.push_back({{"band", b}, {"weight", wgt}});
        j["band_weights"] = bw;
        json comps = json::array();
        for (int b = 0; b < 4; ++b) {
            const WavePacket pr = basis.project(*ref.final_state, b);
            const WavePacket pt = basis.project(*test.final_state, b);
            const double nr = pr.norm() / ref.final_state->norm();
            const double nt = pt.norm() / test.final_state->norm();
            comps.push_back({{"band", b},
                             {"reference_weight", nr * nr},
                             {"test_weight", nt * nt},
                             {"fidelity", nr > 0.0 && nt > 0.0 ? json(fidelity(pr, pt)) : json(nullptr)},
                             {"reference_centroid", nr > 0.0 ? json(centroid(pr)) : json(nullptr)},
                             {"test_centroid", nt > 0.0 ? json(centroid(pt)) : json(nullptr)}});
        }
        j["components"] = comps;
        json norms = json::array();
        for (const auto& [t, n] : r.norms_over_time)
            norms.push_back({t, n});
        j["norms_over_time"] = norms;
        write_json(config, fmt::format("report_{}_vs_{}.json", test.name, ref.name), j, log);
        log << fmt::format("{} vs {}: fidelity {:.6f} reflected {:.3e} delay {:.4f} -> {}\n", test.name, ref.name,
                           r.fidelity, r.reflected_fraction, r.transit_delay,
                           r.invisible() ? "invisible" : fmt::format("{} violation(s)", r.violations()));
    }
}

} // namespace ccrystal::cli
