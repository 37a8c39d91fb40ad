#include "svarma/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "svarma/error.hpp"

namespace svarma::io {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc() || ptr != last) {
        throw Error(ErrorKind::parse, "csv line " + std::to_string(line_no) + ": '" + field + "' is not a number");
    }
    return v;
}

template <class F>
auto wrap_json(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    CsvTable table;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_commas(line);
        if (table.names.empty()) {
            for (auto& f : fields) {
                if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
                if (f.empty()) throw Error(ErrorKind::parse, "csv header: empty column name");
            }
            table.names = std::move(fields);
            continue;
        }
        if (fields.size() != table.names.size()) {
            throw Error(ErrorKind::parse, "csv line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(table.names.size()) + " fields, found " +
                                              std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_number(f, line_no));
        rows.push_back(std::move(row));
    }
    if (table.names.empty()) throw Error(ErrorKind::parse, "csv: missing header row");
    table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) table.data(r, c) = rows[r][c];
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (c) out += ',';
        out += table.names[c];
    }
    out += '\n';
    for (Eigen::Index r = 0; r < table.data.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.data.cols(); ++c) {
            if (c) out += ',';
            out += format_double(table.data(r, c));
        }
        out += '\n';
    }
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, "'" + path.string() + "': " + e.what());
    }
}

CsvTable apply_transforms(const CsvTable& table, const json& transforms, const std::vector<std::string>& columns) {
    std::map<std::string, Eigen::VectorXd> cols;
    std::vector<std::string> order;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        cols[table.names[c]] = table.data.col(static_cast<Eigen::Index>(c));
        order.push_back(table.names[c]);
    }
    const auto T = table.data.rows();
    auto lookup = [&](const std::string& name) -> const Eigen::VectorXd& {
        const auto it = cols.find(name);
        if (it == cols.end()) throw Error(ErrorKind::validation, "transform references unknown column '" + name + "'");
        return it->second;
    };

    wrap_json("transforms", [&] {
        if (transforms.is_null()) return 0;
        for (const auto& tr : transforms) {
            const auto name = tr.at("name").get<std::string>();
            const auto op = tr.at("op").get<std::string>();
            Eigen::VectorXd out = Eigen::VectorXd::Constant(T, kNaN);
            if (op == "copy" || op == "log" || op == "demean") {
                const auto& x = lookup(tr.at("column").get<std::string>());
                if (op == "copy") out = x;
                if (op == "log") {
                    const double scale = tr.value("scale", 1.0);
                    if (!(x.array() > 0.0).all()) throw Error(ErrorKind::validation, "log of a non-positive value in '" + name + "'");
                    out = scale * x.array().log().matrix();
                }
                if (op == "demean") {
                    double sum = 0.0;
                    int count = 0;
                    for (Eigen::Index t = 0; t < T; ++t) {
                        if (!std::isnan(x[t])) {
                            sum += x[t];
                            ++count;
                        }
                    }
                    out = x.array() - (count ? sum / count : 0.0);
                }
            } else if (op == "diff" || op == "log_diff") {
                const auto& x = lookup(tr.at("column").get<std::string>());
                const int lag = tr.value("lag", 1);
                const double scale = tr.value("scale", 1.0);
                if (lag < 1) throw Error(ErrorKind::validation, "lag must be >= 1 in '" + name + "'");
                if (op == "log_diff" && !(x.array() > 0.0 || x.array().isNaN()).all()) {
                    throw Error(ErrorKind::validation, "log of a non-positive value in '" + name + "'");
                }
                for (Eigen::Index t = lag; t < T; ++t) {
                    out[t] = op == "diff" ? scale * (x[t] - x[t - lag]) : scale * (std::log(x[t]) - std::log(x[t - lag]));
                }
            } else if (op == "linear") {
                out = Eigen::VectorXd::Constant(T, tr.value("constant", 0.0));
                for (const auto& term : tr.at("terms")) {
                    out += term.at("coef").get<double>() * lookup(term.at("column").get<std::string>());
                }
            } else {
                throw Error(ErrorKind::validation, "unknown transform op '" + op + "'");
            }
            if (cols.count(name)) throw Error(ErrorKind::validation, "transform redefines column '" + name + "'");
            cols[name] = std::move(out);
            order.push_back(name);
        }
        return 0;
    });

    const std::vector<std::string>& keep = columns.empty() ? order : columns;
    CsvTable result;
    result.names = keep;
    Eigen::MatrixXd full(T, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) full.col(static_cast<Eigen::Index>(c)) = lookup(keep[c]);
    Eigen::Index first = 0;
    while (first < T && full.row(first).array().isNaN().any()) ++first;
    for (Eigen::Index t = first; t < T; ++t) {
        if (full.row(t).array().isNaN().any()) {
            throw Error(ErrorKind::validation, "missing value in row " + std::to_string(t + 1) + " after transforms");
        }
    }
    result.data = full.bottomRows(T - first);
    return result;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    return wrap_json("matrix", [&] {
        const auto rows = static_cast<Eigen::Index>(j.size());
        const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (static_cast<Eigen::Index>(j.at(r).size()) != cols) throw Error(ErrorKind::parse, "ragged matrix");
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
        }
        return m;
    });
}

Eigen::VectorXd vector_from_json(const json& j) {
    return wrap_json("vector", [&] {
        Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
        return v;
    });
}

SvarmaSpec spec_from_json(const json& model) {
    return wrap_json("model", [&] {
        const int n = model.at("n").get<int>();
        const int p = model.value("p", 0);
        const int q = model.value("q", 0);
        std::vector<Family> families;
        for (const auto& d : model.at("densities")) families.push_back(family_from_string(d.at("family").get<std::string>()));
        return SvarmaSpec(n, p, q, std::move(families));
    });
}

ThetaVector theta_from_json(const SvarmaSpec& spec, const json& model) {
    return wrap_json("model.theta", [&] {
        const json& th = model.at("theta");
        ThetaVector t;
        t.pi2 = th.contains("pi2") ? vector_from_json(th["pi2"]) : Eigen::VectorXd::Zero(spec.dim_pi2());
        t.pi3 = th.contains("pi3") ? vector_from_json(th["pi3"]) : Eigen::VectorXd::Zero(spec.dim_pi3());
        if (th.contains("B")) t.beta = beta_from_b(matrix_from_json(th["B"]));
        else t.beta = th.contains("beta") ? vector_from_json(th["beta"]) : Eigen::VectorXd::Zero(spec.dim_beta());
        t.sigma = vector_from_json(th.at("sigma"));
        if (th.contains("lambda")) {
            t.lambda = vector_from_json(th["lambda"]);
        } else {
            t.lambda.resize(spec.dim_lambda());
            const json& dens = model.at("densities");
            for (int i = 0; i < spec.n; ++i) {
                Eigen::VectorXd li = dens.at(i).contains("lambda") ? vector_from_json(dens.at(i)["lambda"])
                                                                   : ComponentDensity::default_lambda(spec.families[i]);
                if (li.size() != lambda_dim(spec.families[i])) throw Error(ErrorKind::parse, "density lambda has wrong length");
                t.lambda.segment(spec.lambda_offset(i), li.size()) = li;
            }
        }
        check_shape(spec, t);
        return t;
    });
}

json model_to_json(const SvarmaSpec& spec, const ThetaVector& theta) {
    json dens = json::array();
    for (int i = 0; i < spec.n; ++i) {
        const int d = lambda_dim(spec.families[i]);
        dens.push_back({{"family", std::string(to_string(spec.families[i]))},
                        {"lambda", vector_to_json(theta.lambda.segment(spec.lambda_offset(i), d))}});
    }
    json th = {{"pi2", vector_to_json(theta.pi2)},   {"pi3", vector_to_json(theta.pi3)},
               {"beta", vector_to_json(theta.beta)}, {"sigma", vector_to_json(theta.sigma)},
               {"lambda", vector_to_json(theta.lambda)}};
    return {{"n", spec.n}, {"p", spec.p}, {"q", spec.q}, {"densities", std::move(dens)}, {"theta", std::move(th)}};
}

EstimateOptions options_from_json(const json& options) {
    EstimateOptions o;
    if (options.is_null()) return o;
    return wrap_json("options", [&] {
        o.max_iter = options.value("max_iter", o.max_iter);
        o.grad_tol = options.value("grad_tol", o.grad_tol);
        o.sigma_min = options.value("sigma_min", o.sigma_min);
        o.seed = options.value("seed", o.seed);
        o.restarts = options.value("restarts", o.restarts);
        if (options.contains("scheme")) o.scheme = scheme_from_string(options["scheme"].get<std::string>());
        return o;
    });
}

json to_json(const EstimationResult& r) {
    json viol = json::array();
    for (const auto& v : r.violations) viol.push_back({{"code", v.code}, {"message", v.message}});
    json out = {{"schema_version", kSchemaVersion},
                {"model", model_to_json(r.spec, r.theta)},
                {"B", matrix_to_json(b_matrix(r.spec, r.theta))},
                {"sigma", vector_to_json(r.theta.sigma)},
                {"scheme", std::string(to_string(r.scheme))},
                {"B_scheme", matrix_to_json(r.b_scheme)},
                {"sigma_scheme", vector_to_json(r.sigma_scheme)},
                {"loglik", r.loglik_value},
                {"T", r.T},
                {"score_norm", r.score_norm},
                {"converged", r.converged},
                {"termination", r.termination},
                {"iterations", r.iterations},
                {"evaluations", r.evaluations},
                {"se_opg", vector_to_json(r.se)},
                {"se_hessian", vector_to_json(r.se_hessian)},
                {"cov_opg", matrix_to_json(r.cov_opg)},
                {"cov_hessian", matrix_to_json(r.cov_hessian)},
                {"cov_error", r.cov_error},
                {"violations", std::move(viol)}};
    return out;
}

json to_json(const OrderSelection& s) {
    json table = json::array();
    for (const auto& row : s.table) {
        table.push_back({{"p", row.p},
                         {"q", row.q},
                         {"dim", row.dim},
                         {"loglik", std::isfinite(row.loglik) ? json(row.loglik) : json(nullptr)},
                         {"aic", std::isfinite(row.aic) ? json(row.aic) : json(nullptr)},
                         {"converged", row.converged},
                         {"error", row.error}});
    }
    return {{"schema_version", kSchemaVersion}, {"p", s.p}, {"q", s.q}, {"table", std::move(table)}};
}

json to_json(const std::vector<ComponentDiagnostics>& diag, const std::vector<std::string>& names, int lags) {
    auto stat = [](const TestStatistic& s) {
        return json{{"statistic", s.statistic}, {"p_value", s.p_value}, {"dof", s.dof}};
    };
    json comps = json::array();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        comps.push_back({{"name", i < names.size() ? names[i] : "shock" + std::to_string(i + 1)},
                         {"ljung_box", stat(diag[i].ljung_box)},
                         {"mcleod_li", stat(diag[i].mcleod_li)},
                         {"jarque_bera", stat(diag[i].jarque_bera)}});
    }
    return {{"schema_version", kSchemaVersion}, {"lags", lags}, {"components", std::move(comps)}};
}

json to_json(const IrfResult& r, const std::vector<std::string>& names) {
    json phi = json::array();
    json fevd = json::array();
    for (const auto& m : r.phi) phi.push_back(matrix_to_json(m));
    for (const auto& m : r.fevd) fevd.push_back(matrix_to_json(m));
    json out = {{"schema_version", kSchemaVersion},
                {"horizon", r.horizon},
                {"shock_size", std::string(to_string(r.shock_size))},
                {"variables", names},
                {"phi", std::move(phi)},
                {"fevd", std::move(fevd)}};
    if (r.bands) {
        json lo = json::array();
        json hi = json::array();
        for (const auto& m : r.bands->lower) lo.push_back(matrix_to_json(m));
        for (const auto& m : r.bands->upper) hi.push_back(matrix_to_json(m));
        out["bands"] = {{"level", r.bands->level},
                        {"replications", r.bands->replications},
                        {"dropped", r.bands->dropped},
                        {"lower", std::move(lo)},
                        {"upper", std::move(hi)},
                        {"sd_B", matrix_to_json(r.bands->sd_b)},
                        {"sd_sigma", vector_to_json(r.bands->sd_sigma)}};
    }
    return out;
}

std::string irf_long_csv(const IrfResult& r, const std::vector<std::string>& names) {
    std::string out = "horizon,response_var,shock,point,lo,hi\n";
    const auto n = r.phi.empty() ? 0 : r.phi.front().rows();
    for (std::size_t j = 0; j < r.phi.size(); ++j) {
        for (Eigen::Index row = 0; row < n; ++row) {
            for (Eigen::Index c = 0; c < n; ++c) {
                out += std::to_string(j) + ',';
                out += (static_cast<std::size_t>(row) < names.size() ? names[row] : "y" + std::to_string(row + 1)) + ',';
                out += "shock" + std::to_string(c + 1) + ',';
                out += format_double(r.phi[j](row, c)) + ',';
                if (r.bands) {
                    out += format_double(r.bands->lower[j](row, c)) + ',' + format_double(r.bands->upper[j](row, c));
                } else {
                    out += ',';
                }
                out += '\n';
            }
        }
    }
    return out;
}

}  // namespace svarma::io
