#include "dyad/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dyad::io {

namespace {

json vector3_to_json(const Vector3d& v) {
    return json::array({v(0), v(1), v(2)});
}

Vector3d vector3_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument(std::string(field) +
                                    " must be an array of 3 numbers");
    }
    return Vector3d{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json matrix3_to_json(const Matrix3d& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    }
    return rows;
}

Matrix3d matrix3_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument(std::string(field) +
                                    " must be a 3x3 array of numbers");
    }
    Matrix3d m;
    for (int i = 0; i < 3; ++i) {
        m.row(i) = vector3_from_json(j[static_cast<std::size_t>(i)], field).transpose();
    }
    return m;
}

void require_field(const json& j, const char* field) {
    if (!j.contains(field)) {
        throw std::invalid_argument(std::string("missing field \"") + field +
                                    "\"");
    }
}

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

} // namespace

json to_json(const GeneralHamiltonian& h) {
    return json{{"alpha", vector3_to_json(h.alpha)},
                {"beta", vector3_to_json(h.beta)},
                {"gamma", matrix3_to_json(h.gamma)}};
}

json to_json(const CanonicalHamiltonian& h) {
    return json{{"alpha", vector3_to_json(h.alpha)},
                {"beta", vector3_to_json(h.beta)},
                {"gamma", vector3_to_json(h.gamma)}};
}

bool is_canonical_schema(const json& j) {
    return j.contains("gamma") && j["gamma"].is_array() &&
           j["gamma"].size() == 3 && j["gamma"][0].is_number();
}

CanonicalHamiltonian canonical_from_json(const json& j) {
    require_field(j, "alpha");
    require_field(j, "beta");
    require_field(j, "gamma");
    if (!is_canonical_schema(j)) {
        throw std::invalid_argument(
            "canonical Hamiltonian needs \"gamma\":[g1,g2,g3]");
    }
    CanonicalHamiltonian h;
    h.alpha = vector3_from_json(j["alpha"], "alpha");
    h.beta = vector3_from_json(j["beta"], "beta");
    h.gamma = vector3_from_json(j["gamma"], "gamma");
    return h;
}

GeneralHamiltonian general_from_json(const json& j) {
    require_field(j, "alpha");
    require_field(j, "beta");
    require_field(j, "gamma");
    if (is_canonical_schema(j)) {
        return to_general(canonical_from_json(j));
    }
    GeneralHamiltonian h;
    h.alpha = vector3_from_json(j["alpha"], "alpha");
    h.beta = vector3_from_json(j["beta"], "beta");
    h.gamma = matrix3_from_json(j["gamma"], "gamma");
    return h;
}

json to_json(const TwoQubitState& s) {
    return json{{"sigma", vector3_to_json(s.sigma)},
                {"xi", vector3_to_json(s.xi)},
                {"corr", matrix3_to_json(s.corr)}};
}

TwoQubitState state_from_json(const json& j) {
    require_field(j, "sigma");
    require_field(j, "xi");
    require_field(j, "corr");
    TwoQubitState s;
    s.sigma = vector3_from_json(j["sigma"], "sigma");
    s.xi = vector3_from_json(j["xi"], "xi");
    s.corr = matrix3_from_json(j["corr"], "corr");
    return s;
}

json to_json(const EnvironmentEstimate& est) {
    json xi = json::array();
    for (int k = 0; k < 3; ++k) {
        if (est.xi_status[static_cast<std::size_t>(k)] == EntryStatus::Determined) {
            xi.push_back(est.xi(k));
        } else {
            xi.push_back(nullptr);
        }
    }
    json corr = json::array();
    for (int jdx = 0; jdx < 3; ++jdx) {
        json row = json::array();
        for (int k = 0; k < 3; ++k) {
            if (est.corr_status[static_cast<std::size_t>(jdx)]
                               [static_cast<std::size_t>(k)] ==
                EntryStatus::Determined) {
                row.push_back(est.corr(jdx, k));
            } else {
                row.push_back(nullptr);
            }
        }
        corr.push_back(row);
    }
    return json{{"xi", xi},
                {"corr", corr},
                {"rank", est.rank},
                {"residual", est.residual}};
}

json to_json(const ReconstructionReport& report) {
    json residuals{{"per_order", report.diagnostics.order_residuals},
                   {"verify_max", report.diagnostics.verify_max},
                   {"beta_solve", report.diagnostics.beta_solve_residual},
                   {"alpha_antisymmetry",
                    report.diagnostics.alpha_antisymmetry_defect},
                   {"epsilon", report.diagnostics.epsilon}};
    return json{{"schema_version", 1},
                {"case", to_string(report.case_class)},
                {"candidate_plus", to_json(report.candidate_plus)},
                {"candidate_minus", to_json(report.candidate_minus)},
                {"frame_r", matrix3_to_json(report.frame_rotation)},
                {"undetermined", report.undetermined},
                {"residuals", residuals}};
}

json to_json(const ClassicalSystem& sys) {
    return json{{"alpha", sys.alpha},
                {"beta", sys.beta},
                {"gamma_prime", sys.gamma_prime},
                {"delta", sys.delta}};
}

ClassicalSystem classical_system_from_json(const json& j) {
    require_field(j, "alpha");
    require_field(j, "beta");
    require_field(j, "gamma_prime");
    require_field(j, "delta");
    ClassicalSystem sys;
    sys.alpha = j["alpha"].get<double>();
    sys.beta = j["beta"].get<double>();
    sys.gamma_prime = j["gamma_prime"].get<double>();
    sys.delta = j["delta"].get<double>();
    return sys;
}

json to_json(const ClassicalCanonical& c) {
    return json{{"alpha", c.alpha},
                {"beta", c.beta},
                {"gamma", c.gamma},
                {"sign", c.sign}};
}

json to_json(const ClassicalReconstruction& r) {
    json out{{"alpha", r.alpha},
             {"hidden_observable", r.hidden_observable},
             {"undetermined", r.undetermined},
             {"residual", r.residual}};
    if (r.hidden_observable) {
        out["system"] = to_json(r.system);
        out["y0"] = r.y0;
    }
    return out;
}

std::string trajectory_csv_header() {
    std::ostringstream out;
    out << "t";
    for (int n = 1; n <= 3; ++n) {
        for (int j = 1; j <= 3; ++j) {
            out << ",u" << n << j;
        }
    }
    for (int n = 1; n <= 3; ++n) {
        for (int k = 1; k <= 3; ++k) {
            out << ",v" << n << k;
        }
    }
    for (int n = 1; n <= 3; ++n) {
        for (int j = 1; j <= 3; ++j) {
            for (int k = 1; k <= 3; ++k) {
                out << ",w" << n << j << k;
            }
        }
    }
    return out.str();
}

std::string trajectory_csv(const std::vector<MapSnapshot>& snapshots) {
    std::ostringstream out;
    out << trajectory_csv_header() << "\n";
    for (const auto& snapshot : snapshots) {
        out << format_double(snapshot.t);
        const auto flat = flatten_maps(snapshot.maps);
        for (int i = 0; i < flat.size(); ++i) {
            out << "," << format_double(flat(i));
        }
        out << "\n";
    }
    return out.str();
}

std::vector<MapSnapshot> parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("trajectory CSV is empty");
    }
    if (line != trajectory_csv_header()) {
        throw std::invalid_argument("trajectory CSV header mismatch");
    }
    std::vector<MapSnapshot> snapshots;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string token;
        Eigen::Matrix<double, 46, 1> row;
        int idx = 0;
        while (std::getline(fields, token, ',')) {
            if (idx >= 46) {
                throw std::invalid_argument("trajectory CSV row too long");
            }
            row(idx++) = std::stod(token);
        }
        if (idx != 46) {
            throw std::invalid_argument("trajectory CSV row too short");
        }
        MapSnapshot snapshot;
        snapshot.t = row(0);
        snapshot.maps = unflatten_maps(row.tail<45>());
        snapshots.push_back(snapshot);
    }
    return snapshots;
}

std::string means_csv(const std::vector<double>& times,
                      const std::vector<Vector3d>& means) {
    if (times.size() != means.size()) {
        throw std::invalid_argument("means_csv: size mismatch");
    }
    std::ostringstream out;
    out << "t,s1,s2,s3\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]) << "," << format_double(means[i](0))
            << "," << format_double(means[i](1)) << ","
            << format_double(means[i](2)) << "\n";
    }
    return out.str();
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() +
                                     " for writing");
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return json::parse(in);
}

std::string load_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace dyad::io
