#include "fuzzproc/config.hpp"

#include "fuzzproc/csv.hpp"
#include "fuzzproc/ensemble.hpp"
#include "fuzzproc/rng.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

namespace fuzzproc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ConfigError(where, msg);
}

void expectObject(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
}

// Strictness: every object is checked against its full key list.
void checkKeys(const json& j, const std::string& where,
               const std::set<std::string>& allowed,
               const std::set<std::string>& required) {
    expectObject(j, where);
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            fail(where + "." + item.key(), "unknown field");
    for (const auto& key : required)
        if (!j.contains(key)) fail(where, "missing required field '" + key + "'");
}

double getDouble(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

long long getInt(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<long long>();
}

std::string getString(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

bool getBool(const json& j, const std::string& where) {
    if (!j.is_boolean()) fail(where, "expected a boolean");
    return j.get<bool>();
}

int getDim(const json& j, const std::string& where) {
    const long long v = getInt(j, where);
    if (v < 1 || v > 4096) fail(where, "expected a dimension in [1, 4096]");
    return static_cast<int>(v);
}

std::vector<double> getDoubleList(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(getDouble(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Eigen::MatrixXd parseRealGrid(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(where, "expected rows to be non-empty arrays");
    Eigen::MatrixXd M(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rw = where + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != cols) fail(rw, "ragged row");
        for (std::size_t c = 0; c < cols; ++c)
            M(r, c) = getDouble(j[r][c], rw + "[" + std::to_string(c) + "]");
    }
    return M;
}

Matrix parseMatrix(const json& j, const std::string& where, int rows, int cols) {
    checkKeys(j, where, {"re", "im"}, {"re"});
    const Eigen::MatrixXd re = parseRealGrid(j["re"], where + ".re");
    Matrix M = re.cast<Complex>();
    if (j.contains("im")) {
        const Eigen::MatrixXd im = parseRealGrid(j["im"], where + ".im");
        if (im.rows() != re.rows() || im.cols() != re.cols())
            fail(where, "re and im shapes differ");
        M += Complex(0, 1) * im.cast<Complex>();
    }
    if (rows > 0 && (M.rows() != rows || M.cols() != cols))
        fail(where, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " matrix, got " + std::to_string(M.rows()) + "x" +
                        std::to_string(M.cols()));
    return M;
}

json matrixToJson(const Matrix& M) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json rowRe = json::array(), rowIm = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            rowRe.push_back(M(r, c).real());
            rowIm.push_back(M(r, c).imag());
        }
        re.push_back(rowRe);
        im.push_back(rowIm);
    }
    return json{{"re", re}, {"im", im}};
}

// Deterministic stream id for the random ingredient at document position
// `slot` with optional local "seed" field.
std::mt19937_64 ingredientRng(const json& j, std::uint64_t runSeed, std::uint64_t slot) {
    const std::uint64_t local =
        j.contains("seed") ? static_cast<std::uint64_t>(getInt(j["seed"], "seed")) : 0;
    return makeRng(runSeed, mixSeed(local, slot));
}

Matrix parseState(const json& j, const std::string& where, int d, std::uint64_t seed,
                  std::uint64_t slot) {
    expectObject(j, where);
    const std::string type =
        j.contains("type") ? getString(j["type"], where + ".type") : "";
    if (type == "matrix") {
        checkKeys(j, where, {"type", "re", "im"}, {"re"});
        json m = j;
        m.erase("type");
        return parseMatrix(m, where, d, d);
    }
    if (type == "randomPure") {
        checkKeys(j, where, {"type", "seed"}, {});
        auto rng = ingredientRng(j, seed, slot);
        const Vector v = randomPureState(d, rng);
        return v * v.adjoint();
    }
    if (type == "randomMixed") {
        checkKeys(j, where, {"type", "seed"}, {});
        auto rng = ingredientRng(j, seed, slot);
        return randomDensityMatrix(d, d, rng);
    }
    if (type == "maximallyMixed") {
        checkKeys(j, where, {"type"}, {});
        return identity(d) / static_cast<double>(d);
    }
    fail(where + ".type",
         "expected one of 'matrix', 'randomPure', 'randomMixed', 'maximallyMixed'");
}

Matrix parseObservable(const json& j, const std::string& where, int d,
                       std::uint64_t seed, std::uint64_t slot) {
    expectObject(j, where);
    const std::string type =
        j.contains("type") ? getString(j["type"], where + ".type") : "";
    if (type == "matrix") {
        json m = j;
        m.erase("type");
        checkKeys(m, where, {"re", "im"}, {"re"});
        return parseMatrix(m, where, d, d);
    }
    if (type == "randomHermitian") {
        checkKeys(j, where, {"type", "seed"}, {});
        auto rng = ingredientRng(j, seed, slot);
        return randomHermitian(d, rng);
    }
    fail(where + ".type", "expected 'matrix' or 'randomHermitian'");
}

Matrix parseHamiltonian(const json& j, const std::string& where, int dimE, int dimS,
                        std::uint64_t seed, std::uint64_t slot) {
    expectObject(j, where);
    const std::string kind =
        j.contains("kind") ? getString(j["kind"], where + ".kind") : "";
    HamiltonianModel model;
    model.dimE = dimE;
    model.dimS = dimS;
    if (kind == "randomGaussianHermitian") {
        checkKeys(j, where, {"kind", "seed"}, {});
        model.kind = HamiltonianKind::RandomGaussianHermitian;
        const std::uint64_t local =
            j.contains("seed") ? static_cast<std::uint64_t>(getInt(j["seed"], where + ".seed"))
                               : 0;
        model.seed = mixSeed(seed, mixSeed(local, slot));
        return buildHamiltonian(model);
    }
    if (kind == "heisenbergChain") {
        checkKeys(j, where, {"kind", "coupling", "field"}, {"coupling", "field"});
        model.kind = HamiltonianKind::HeisenbergChain;
        model.parameters = {getDouble(j["coupling"], where + ".coupling"),
                            getDouble(j["field"], where + ".field")};
        return buildHamiltonian(model);
    }
    if (kind == "diagonalSpectrum") {
        checkKeys(j, where, {"kind", "energies"}, {"energies"});
        model.kind = HamiltonianKind::DiagonalSpectrum;
        model.parameters = getDoubleList(j["energies"], where + ".energies");
        if (static_cast<int>(model.parameters.size()) != dimE * dimS)
            fail(where + ".energies", "expected dE*dS energies");
        return buildHamiltonian(model);
    }
    if (kind == "matrix") {
        json m = j;
        m.erase("kind");
        checkKeys(m, where, {"re", "im"}, {"re"});
        return parseMatrix(m, where, dimE * dimS, dimE * dimS);
    }
    fail(where + ".kind",
         "expected one of 'randomGaussianHermitian', 'heisenbergChain', "
         "'diagonalSpectrum', 'matrix'");
}

WaitingTimeDistribution parseDistribution(const json& j, const std::string& where) {
    checkKeys(j, where, {"family", "tau", "T"}, {"family", "tau"});
    WaitingTimeDistribution d;
    const std::string fam = getString(j["family"], where + ".family");
    try {
        d.family = familyFromName(fam);
    } catch (const std::exception& e) {
        fail(where + ".family", e.what());
    }
    d.tau = getDouble(j["tau"], where + ".tau");
    if (d.tau < 0) fail(where + ".tau", "tau must be >= 0");
    if (d.family == DistributionFamily::Delta) {
        d.fuzziness = 0.0;  // T, if present, is ignored for the point mass
    } else {
        if (!j.contains("T")) fail(where, "missing required field 'T'");
        d.fuzziness = getDouble(j["T"], where + ".T");
        if (d.fuzziness <= 0) fail(where + ".T", "T must be > 0");
    }
    return d;
}

json distributionToJson(const WaitingTimeDistribution& d) {
    json out{{"family", familyName(d.family)}, {"tau", d.tau}};
    if (d.family != DistributionFamily::Delta) out["T"] = d.fuzziness;
    return out;
}

WeightedOperation parseOperation(const json& j, const std::string& where, int d,
                                 std::uint64_t seed, std::uint64_t slot) {
    expectObject(j, where);
    const std::string type =
        j.contains("type") ? getString(j["type"], where + ".type") : "";
    if (type == "identity") {
        checkKeys(j, where, {"type"}, {});
        return WeightedOperation::identityOp(d);
    }
    if (type == "kraus") {
        checkKeys(j, where, {"type", "weights", "kraus"}, {"weights", "kraus"});
        WeightedOperation op;
        op.weights = getDoubleList(j["weights"], where + ".weights");
        if (!j["kraus"].is_array() || j["kraus"].empty())
            fail(where + ".kraus", "expected a non-empty array of matrices");
        for (std::size_t i = 0; i < j["kraus"].size(); ++i)
            op.kraus.push_back(parseMatrix(
                j["kraus"][i], where + ".kraus[" + std::to_string(i) + "]", d, d));
        if (op.weights.size() != op.kraus.size())
            fail(where, "weights and kraus lengths differ");
        return op;
    }
    if (type == "randomChannel") {
        checkKeys(j, where, {"type", "seed", "nKraus"}, {});
        const int nKraus =
            j.contains("nKraus")
                ? static_cast<int>(getInt(j["nKraus"], where + ".nKraus"))
                : 2;
        if (nKraus < 1) fail(where + ".nKraus", "nKraus must be >= 1");
        auto rng = ingredientRng(j, seed, slot);
        return randomChannel(d, nKraus, rng);
    }
    if (type == "randomWeightedMeasurement") {
        checkKeys(j, where, {"type", "seed"}, {});
        auto rng = ingredientRng(j, seed, slot);
        return randomWeightedMeasurement(d, rng);
    }
    if (type == "randomSubChannel") {
        checkKeys(j, where, {"type", "seed", "nKraus", "scale"}, {});
        const int nKraus =
            j.contains("nKraus")
                ? static_cast<int>(getInt(j["nKraus"], where + ".nKraus"))
                : 2;
        const double scale =
            j.contains("scale") ? getDouble(j["scale"], where + ".scale") : 0.8;
        auto rng = ingredientRng(j, seed, slot);
        return randomSubChannel(d, nKraus, scale, rng);
    }
    fail(where + ".type",
         "expected one of 'identity', 'kraus', 'randomChannel', "
         "'randomWeightedMeasurement', 'randomSubChannel'");
}

EnsembleParams::OpKind parseOpKind(const std::string& s, const std::string& where) {
    if (s == "channel") return EnsembleParams::OpKind::Channel;
    if (s == "weightedMeasurement") return EnsembleParams::OpKind::WeightedMeasurement;
    if (s == "subChannel") return EnsembleParams::OpKind::SubChannel;
    if (s == "identity") return EnsembleParams::OpKind::Identity;
    fail(where, "expected one of 'channel', 'weightedMeasurement', 'subChannel', "
                "'identity'");
}

ProcessSpec specFromPreset(const json& p, const std::string& where, std::uint64_t seed) {
    checkKeys(p, where,
              {"dE", "dS", "dGamma", "k", "family", "tau", "T", "pure",
               "perStepEnergies", "operationKind", "seed"},
              {});
    EnsembleParams params;
    if (p.contains("dE")) params.dimE = getDim(p["dE"], where + ".dE");
    if (p.contains("dS")) params.dimS = getDim(p["dS"], where + ".dS");
    if (p.contains("dGamma")) params.dimGamma = getDim(p["dGamma"], where + ".dGamma");
    if (p.contains("k")) {
        const long long k = getInt(p["k"], where + ".k");
        if (k < 0 || k > 8) fail(where + ".k", "expected k in [0, 8]");
        params.k = static_cast<int>(k);
    }
    if (p.contains("family")) {
        try {
            params.family = familyFromName(getString(p["family"], where + ".family"));
        } catch (const std::exception& e) {
            fail(where + ".family", e.what());
        }
    }
    if (p.contains("tau")) {
        params.tau = getDouble(p["tau"], where + ".tau");
        if (params.tau < 0) fail(where + ".tau", "tau must be >= 0");
    }
    if (p.contains("T")) {
        params.fuzziness = getDouble(p["T"], where + ".T");
        if (params.fuzziness <= 0) fail(where + ".T", "T must be > 0");
    }
    if (p.contains("pure")) params.purity = getBool(p["pure"], where + ".pure");
    if (p.contains("perStepEnergies"))
        params.perStepEnergies = getBool(p["perStepEnergies"], where + ".perStepEnergies");
    if (p.contains("operationKind"))
        params.opKind = parseOpKind(getString(p["operationKind"], where + ".operationKind"),
                                    where + ".operationKind");
    const std::uint64_t local =
        p.contains("seed") ? static_cast<std::uint64_t>(getInt(p["seed"], where + ".seed"))
                           : 0;
    return randomProcessSpec(params, mixSeed(seed, local));
}

}  // namespace

ProcessSpec processSpecFromJson(const json& j, const std::string& where,
                                std::uint64_t seed) {
    expectObject(j, where);
    if (j.contains("preset")) {
        checkKeys(j, where, {"preset"}, {"preset"});
        return specFromPreset(j["preset"], where + ".preset", seed);
    }
    checkKeys(j, where,
              {"dims", "initialState", "ancillaState", "hamiltonian", "steps",
               "operations"},
              {"dims", "initialState", "hamiltonian", "steps", "operations"});

    ProcessSpec spec;
    const json& dims = j["dims"];
    checkKeys(dims, where + ".dims", {"dE", "dS", "dGamma"}, {"dE", "dS"});
    spec.dimE = getDim(dims["dE"], where + ".dims.dE");
    spec.dimS = getDim(dims["dS"], where + ".dims.dS");
    spec.dimGamma = dims.contains("dGamma")
                        ? getDim(dims["dGamma"], where + ".dims.dGamma")
                        : 1;

    std::uint64_t slot = 1;
    spec.rho = parseState(j["initialState"], where + ".initialState",
                          spec.dimE * spec.dimS, seed, slot++);
    if (j.contains("ancillaState")) {
        spec.gamma = parseState(j["ancillaState"], where + ".ancillaState",
                                spec.dimGamma, seed, slot++);
    } else {
        spec.gamma = Matrix::Zero(spec.dimGamma, spec.dimGamma);
        spec.gamma(0, 0) = 1.0;
    }

    const Matrix H = parseHamiltonian(j["hamiltonian"], where + ".hamiltonian",
                                      spec.dimE, spec.dimS, seed, slot++);
    try {
        spec.base = spectralDecompose(H);
    } catch (const std::exception& e) {
        fail(where + ".hamiltonian", e.what());
    }

    const json& steps = j["steps"];
    if (!steps.is_array() || steps.empty())
        fail(where + ".steps", "expected a non-empty array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string sw = where + ".steps[" + std::to_string(i) + "]";
        checkKeys(steps[i], sw, {"distribution", "energies"}, {"distribution"});
        ProcessStep step;
        step.dist = parseDistribution(steps[i]["distribution"], sw + ".distribution");
        if (steps[i].contains("energies")) {
            step.energies = getDoubleList(steps[i]["energies"], sw + ".energies");
            if (static_cast<int>(step.energies.size()) != spec.base.levelCount())
                fail(sw + ".energies",
                     "expected one energy per level (" +
                         std::to_string(spec.base.levelCount()) + ")");
        } else {
            step.energies = spec.base.energies;
        }
        spec.steps.push_back(step);
    }

    const json& ops = j["operations"];
    if (!ops.is_array() || ops.size() != steps.size())
        fail(where + ".operations", "expected exactly one operation per step");
    for (std::size_t i = 0; i < ops.size(); ++i)
        spec.operations.push_back(parseOperation(
            ops[i], where + ".operations[" + std::to_string(i) + "]",
            spec.dimS * spec.dimGamma, seed, slot++));

    try {
        spec.validate();
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
    return spec;
}

json processSpecToJson(const ProcessSpec& spec) {
    json out;
    out["dims"] = {{"dE", spec.dimE}, {"dS", spec.dimS}, {"dGamma", spec.dimGamma}};
    json rho = matrixToJson(spec.rho);
    rho["type"] = "matrix";
    out["initialState"] = rho;
    json gamma = matrixToJson(spec.gamma);
    gamma["type"] = "matrix";
    out["ancillaState"] = gamma;
    json H = matrixToJson(spec.base.hamiltonian());
    H["kind"] = "matrix";
    out["hamiltonian"] = H;
    out["steps"] = json::array();
    for (const auto& step : spec.steps)
        out["steps"].push_back(
            {{"distribution", distributionToJson(step.dist)}, {"energies", step.energies}});
    out["operations"] = json::array();
    for (const auto& op : spec.operations) {
        json kraus = json::array();
        for (const auto& K : op.kraus) kraus.push_back(matrixToJson(K));
        out["operations"].push_back(
            {{"type", "kraus"}, {"weights", op.weights}, {"kraus", kraus}});
    }
    return out;
}

json boundReportToJson(const BoundReport& r) {
    json aux = json::array();
    for (const auto& a : r.auxiliaryC)
        aux.push_back({{"fourTerm", a.fourTerm}, {"commutatorForm", a.commutatorForm}});
    return json{{"lhs", r.lhs},
                {"termA", r.termA},
                {"termsB", r.termsB},
                {"termsC", r.termsC},
                {"opNorms", r.opNorms},
                {"opNormFull", r.opNormFull},
                {"opNormProduct", r.opNormProduct},
                {"sFactors", r.sFactors},
                {"sFactorTotal", r.sFactorTotal},
                {"stateDistance", r.stateDistance},
                {"rhsTotal", r.rhsTotal},
                {"slack", r.slack},
                {"auxiliaryC", aux}};
}

json mcEstimateToJson(const McEstimate& est, const std::string& quantity) {
    return json{{"quantity", quantity},
                {"mean", est.mean},
                {"stderr", est.stderror},
                {"n", est.samples},
                {"seed", est.seed}};
}

std::string kindName(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::SingleTime: return "single-time";
        case ExperimentKind::MultiTime: return "multi-time";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::MonteCarlo: return "montecarlo";
        case ExperimentKind::ChoiCheck: return "choi-check";
    }
    return "?";
}

namespace {

ExperimentKind kindFromName(const std::string& s, const std::string& where) {
    if (s == "single-time") return ExperimentKind::SingleTime;
    if (s == "multi-time") return ExperimentKind::MultiTime;
    if (s == "sweep") return ExperimentKind::Sweep;
    if (s == "montecarlo") return ExperimentKind::MonteCarlo;
    if (s == "choi-check") return ExperimentKind::ChoiCheck;
    fail(where, "expected one of 'single-time', 'multi-time', 'sweep', 'montecarlo', "
                "'choi-check'");
}

const std::set<std::string> kSweepParams = {"T", "tau", "k", "dE", "dGamma", "family"};

// Produces the spec JSON for one sweep grid point.
json applySweepValue(json specJson, const std::string& param, const json& value,
                     const std::string& where) {
    if (specJson.contains("preset")) {
        specJson["preset"][param] = value;
        return specJson;
    }
    if (param == "T" || param == "tau" || param == "family") {
        for (auto& step : specJson["steps"]) step["distribution"][param] = value;
        return specJson;
    }
    fail(where, "parameter '" + param + "' can only be swept on a preset spec");
}

void validateSweepSection(const json& cfg, const std::string& where) {
    const json& sweep = cfg["sweep"];
    checkKeys(sweep, where, {"parameter", "values"}, {"parameter", "values"});
    const std::string param = getString(sweep["parameter"], where + ".parameter");
    if (!kSweepParams.count(param))
        fail(where + ".parameter",
             "expected one of 'T', 'tau', 'k', 'dE', 'dGamma', 'family'");
    const json& values = sweep["values"];
    if (!values.is_array() || values.empty())
        fail(where + ".values", "expected a non-empty array");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::string vw = where + ".values[" + std::to_string(i) + "]";
        if (param == "family") {
            getString(values[i], vw);
        } else if (param == "k" || param == "dE" || param == "dGamma") {
            getInt(values[i], vw);
        } else {
            getDouble(values[i], vw);
        }
        // Deep-check each grid point resolves to a valid spec.
        processSpecFromJson(applySweepValue(cfg["spec"], param, values[i], vw), "$.spec",
                            0);
    }
}

struct SingleTimeSetup {
    int dimE = 1, dimS = 2;
    Matrix rho, A;
    SpectralDecomposition spec;
    WaitingTimeDistribution dist;
    std::optional<double> epsilon;
    std::optional<double> window;
    long long samples = 2000;
};

SingleTimeSetup parseSingleTime(const json& j, const std::string& where,
                                std::uint64_t seed) {
    checkKeys(j, where,
              {"dims", "hamiltonian", "state", "observable", "distribution", "epsilon",
               "window", "samples"},
              {"dims", "hamiltonian", "state", "observable", "distribution"});
    SingleTimeSetup s;
    checkKeys(j["dims"], where + ".dims", {"dE", "dS"}, {"dE", "dS"});
    s.dimE = getDim(j["dims"]["dE"], where + ".dims.dE");
    s.dimS = getDim(j["dims"]["dS"], where + ".dims.dS");
    const int d = s.dimE * s.dimS;
    const Matrix H =
        parseHamiltonian(j["hamiltonian"], where + ".hamiltonian", s.dimE, s.dimS, seed, 101);
    try {
        s.spec = spectralDecompose(H);
    } catch (const std::exception& e) {
        fail(where + ".hamiltonian", e.what());
    }
    s.rho = parseState(j["state"], where + ".state", d, seed, 102);
    s.A = parseObservable(j["observable"], where + ".observable", d, seed, 103);
    s.dist = parseDistribution(j["distribution"], where + ".distribution");
    if (j.contains("epsilon")) {
        s.epsilon = getDouble(j["epsilon"], where + ".epsilon");
        if (*s.epsilon <= 0) fail(where + ".epsilon", "epsilon must be > 0");
    }
    if (j.contains("window")) {
        s.window = getDouble(j["window"], where + ".window");
        if (*s.window <= 0) fail(where + ".window", "window must be > 0");
    }
    if (j.contains("samples")) {
        s.samples = getInt(j["samples"], where + ".samples");
        if (s.samples < 1) fail(where + ".samples", "samples must be >= 1");
    }
    return s;
}

double tolSlack(const json& cfg) {
    if (cfg.contains("tolerances") && cfg["tolerances"].contains("slack"))
        return cfg["tolerances"]["slack"].get<double>();
    return -1e-9;
}

double tolDuality(const json& cfg) {
    if (cfg.contains("tolerances") && cfg["tolerances"].contains("duality"))
        return cfg["tolerances"]["duality"].get<double>();
    return 1e-10;
}

}  // namespace

ExperimentConfig parseExperimentConfig(const json& doc) {
    checkKeys(doc, "$",
              {"kind", "seed", "output", "spec", "sweep", "samples", "singleTime",
               "tolerances"},
              {"kind"});
    ExperimentConfig cfg;
    cfg.kind = kindFromName(getString(doc["kind"], "$.kind"), "$.kind");
    if (doc.contains("seed")) {
        const long long s = getInt(doc["seed"], "$.seed");
        if (s < 0) fail("$.seed", "seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (doc.contains("output")) {
        cfg.output = getString(doc["output"], "$.output");
        if (cfg.output.empty() || cfg.output.find('/') != std::string::npos)
            fail("$.output", "expected a plain file basename");
    }
    if (doc.contains("tolerances"))
        checkKeys(doc["tolerances"], "$.tolerances", {"slack", "duality"}, {});

    auto require = [&](const char* key) {
        if (!doc.contains(key))
            fail("$", std::string("kind '") + kindName(cfg.kind) +
                          "' requires field '" + key + "'");
    };
    auto forbid = [&](const char* key) {
        if (doc.contains(key))
            fail(std::string("$.") + key,
                 std::string("not allowed for kind '") + kindName(cfg.kind) + "'");
    };

    switch (cfg.kind) {
        case ExperimentKind::SingleTime:
            require("singleTime");
            forbid("spec");
            forbid("sweep");
            forbid("samples");
            parseSingleTime(doc["singleTime"], "$.singleTime", 0);
            break;
        case ExperimentKind::MultiTime:
        case ExperimentKind::ChoiCheck:
            require("spec");
            forbid("sweep");
            forbid("samples");
            forbid("singleTime");
            processSpecFromJson(doc["spec"], "$.spec", 0);
            break;
        case ExperimentKind::Sweep:
            require("spec");
            require("sweep");
            forbid("samples");
            forbid("singleTime");
            validateSweepSection(doc, "$.sweep");
            break;
        case ExperimentKind::MonteCarlo:
            require("spec");
            require("samples");
            forbid("sweep");
            forbid("singleTime");
            if (getInt(doc["samples"], "$.samples") < 1)
                fail("$.samples", "samples must be >= 1");
            processSpecFromJson(doc["spec"], "$.spec", 0);
            break;
    }
    cfg.raw = doc;
    return cfg;
}

ExperimentConfig loadExperimentConfig(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("$", "cannot open config file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail("$", std::string("JSON parse error: ") + e.what());
    }
    return parseExperimentConfig(doc);
}

namespace {

void writeTextAtomic(const std::string& text, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string defaultBasename(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::SingleTime: return "single_time";
        case ExperimentKind::MultiTime: return "bounds";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::MonteCarlo: return "montecarlo";
        case ExperimentKind::ChoiCheck: return "choi_check";
    }
    return "out";
}

std::vector<std::string> boundRow(const ProcessSpec& spec, const BoundReport& r) {
    double sumB = 0, sumC = 0;
    for (double b : r.termsB) sumB += b;
    for (double c : r.termsC) sumC += c;
    const auto& d0 = spec.steps.front().dist;
    return {std::to_string(spec.k()),
            std::to_string(spec.dimE),
            std::to_string(spec.dimS),
            std::to_string(spec.dimGamma),
            familyName(d0.family),
            formatDouble(d0.fuzziness),
            formatDouble(r.lhs),
            formatDouble(r.termA),
            formatDouble(sumB),
            formatDouble(sumC),
            formatDouble(r.rhsTotal),
            formatDouble(r.slack)};
}

const std::vector<std::string> kBoundHeader = {"k",     "dE",    "dS",   "dGamma",
                                               "family", "T",    "lhs",  "termA",
                                               "sumB",  "sumC",  "rhs",  "slack"};

// Writes the repro artifact for a failed inequality check and returns its path.
std::filesystem::path writeRepro(const std::filesystem::path& outDir,
                                 const std::string& basename, const json& configRaw,
                                 const ProcessSpec& spec, const json& detail) {
    json repro{{"config", configRaw},
               {"resolvedSpec", processSpecToJson(spec)},
               {"detail", detail}};
    const auto path = outDir / (basename + "_repro.json");
    writeTextAtomic(repro.dump(2) + "\n", path);
    return path;
}

}  // namespace

RunResult runExperiment(const ExperimentConfig& config, const RunOptions& options) {
    const std::uint64_t seed = options.seed.value_or(config.seed);
    const std::string basename =
        config.output.empty() ? defaultBasename(config.kind) : config.output;
    std::filesystem::create_directories(options.outDir);
    const auto csvPath = options.outDir / (basename + ".csv");
    const auto jsonPath = options.outDir / (basename + ".json");

    RunResult result;
    CsvTable table;
    json detail;
    const double slackTol = tolSlack(config.raw);
    const double dualityTol = tolDuality(config.raw);

    switch (config.kind) {
        case ExperimentKind::MultiTime: {
            const ProcessSpec spec =
                processSpecFromJson(config.raw["spec"], "$.spec", seed);
            const BoundReport report = multiTimeBound(spec);
            table.header = kBoundHeader;
            table.rows.push_back(boundRow(spec, report));
            detail = json::array({boundReportToJson(report)});
            if (report.slack < slackTol) {
                result.status = 3;
                result.files.push_back(writeRepro(options.outDir, basename, config.raw,
                                                  spec, boundReportToJson(report)));
                result.message = "inequality violated: slack = " +
                                 formatDouble(report.slack);
            } else {
                result.message = "slack = " + formatDouble(report.slack);
            }
            break;
        }
        case ExperimentKind::Sweep: {
            const std::string param = config.raw["sweep"]["parameter"];
            const json values = config.raw["sweep"]["values"];
            const std::size_t n = values.size();
            std::vector<ProcessSpec> specs(n);
            std::vector<BoundReport> reports(n);

            // Parallel pool over grid points; rows gathered in grid order.
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    specs[i] = processSpecFromJson(
                        applySweepValue(config.raw["spec"], param, values[i], "$.spec"),
                        "$.spec", seed);
                    reports[i] = multiTimeBound(specs[i]);
                }
            };
            const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(n)));
            std::vector<std::thread> pool;
            for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();

            table.header = kBoundHeader;
            detail = json::array();
            for (std::size_t i = 0; i < n; ++i) {
                table.rows.push_back(boundRow(specs[i], reports[i]));
                json rec = boundReportToJson(reports[i]);
                rec["sweepValue"] = values[i];
                detail.push_back(rec);
                if (reports[i].slack < slackTol && result.status == 0) {
                    result.status = 3;
                    result.files.push_back(writeRepro(options.outDir, basename,
                                                      config.raw, specs[i],
                                                      boundReportToJson(reports[i])));
                    result.message = "inequality violated at grid point " +
                                     std::to_string(i) + ": slack = " +
                                     formatDouble(reports[i].slack);
                }
            }
            if (result.status == 0)
                result.message = std::to_string(n) + " grid points, all slacks >= " +
                                 formatDouble(slackTol);
            break;
        }
        case ExperimentKind::MonteCarlo: {
            const ProcessSpec spec =
                processSpecFromJson(config.raw["spec"], "$.spec", seed);
            const long long samples = config.raw["samples"].get<long long>();
            const double analytic =
                propagate(spec, EvolutionMode::Fuzzy).finalExpectation;
            const McEstimate est = mcExpectation(spec, samples, seed);
            table.header = {"quantity", "mean", "stderr", "n", "seed"};
            table.rows.push_back({"fuzzyExpectationMc", formatDouble(est.mean),
                                  formatDouble(est.stderror),
                                  std::to_string(est.samples), std::to_string(est.seed)});
            table.rows.push_back({"fuzzyExpectationAnalytic", formatDouble(analytic),
                                  formatDouble(0.0), "0", std::to_string(seed)});
            detail = json::array({mcEstimateToJson(est, "fuzzyExpectationMc"),
                                  json{{"quantity", "fuzzyExpectationAnalytic"},
                                       {"mean", analytic}}});
            const double tol = 5.0 * est.stderror + 1e-9;
            if (std::abs(est.mean - analytic) > tol) {
                result.status = 3;
                result.files.push_back(writeRepro(options.outDir, basename, config.raw,
                                                  spec, detail));
                result.message = "Monte Carlo estimate " + formatDouble(est.mean) +
                                 " deviates from analytic " + formatDouble(analytic) +
                                 " beyond 5 standard errors";
            } else {
                result.message = "|mc - analytic| = " +
                                 formatDouble(std::abs(est.mean - analytic)) +
                                 " <= " + formatDouble(tol);
            }
            break;
        }
        case ExperimentKind::ChoiCheck: {
            const ProcessSpec spec =
                processSpecFromJson(config.raw["spec"], "$.spec", seed);
            std::vector<double> times;
            for (const auto& step : spec.steps) times.push_back(step.dist.tau);
            const double sequential =
                propagate(spec, EvolutionMode::FixedTimes, times).finalExpectation;
            const ChoiProcessTensor choi = buildChoi(spec, EvolutionMode::FixedTimes,
                                                     times, options.maxChoiDim);
            const MultiTimeObservable lambda = buildObservableTensor(
                spec.operations, spec.gamma, spec.dimS, spec.dimGamma);
            const double contraction = bornContraction(lambda, choi, 1e-8);
            const double diff = std::abs(sequential - contraction);

            Eigen::SelfAdjointEigenSolver<Matrix> es(
                (choi.tensor + choi.tensor.adjoint()) / 2.0);
            const double minEig = es.eigenvalues().minCoeff();
            const double trace = choi.tensor.trace().real();
            const double traceExpected = std::pow(spec.dimS, spec.k());

            table.header = {"k",        "dE",       "dS",           "dGamma",
                            "maxAbsDiff", "choiTrace", "traceExpected", "minEigenvalue"};
            table.rows.push_back({std::to_string(spec.k()), std::to_string(spec.dimE),
                                  std::to_string(spec.dimS),
                                  std::to_string(spec.dimGamma), formatDouble(diff),
                                  formatDouble(trace), formatDouble(traceExpected),
                                  formatDouble(minEig)});
            detail = json{{"sequential", sequential},
                          {"contraction", contraction},
                          {"maxAbsDiff", diff},
                          {"choiTrace", trace},
                          {"traceExpected", traceExpected},
                          {"minEigenvalue", minEig}};
            const double scale = std::max(1.0, std::abs(sequential));
            if (diff > dualityTol * scale || minEig < -1e-10 ||
                std::abs(trace - traceExpected) > 1e-8) {
                result.status = 3;
                result.files.push_back(
                    writeRepro(options.outDir, basename, config.raw, spec, detail));
                result.message = "process-tensor check failed: |diff| = " +
                                 formatDouble(diff) + ", minEig = " +
                                 formatDouble(minEig);
            } else {
                result.message = "|sequential - contraction| = " + formatDouble(diff);
            }
            break;
        }
        case ExperimentKind::SingleTime: {
            const SingleTimeSetup s =
                parseSingleTime(config.raw["singleTime"], "$.singleTime", seed);
            const SingleTimeBound bound = singleTimeBound(s.rho, s.spec, s.dist, s.A);
            table.header = {"dE",  "dS",  "family", "tau", "T",
                            "fuzzScale", "lhs", "rhs", "slack"};
            table.rows.push_back({std::to_string(s.dimE), std::to_string(s.dimS),
                                  familyName(s.dist.family), formatDouble(s.dist.tau),
                                  formatDouble(s.dist.fuzziness),
                                  formatDouble(bound.fuzzScale), formatDouble(bound.lhs),
                                  formatDouble(bound.rhs),
                                  formatDouble(bound.rhs - bound.lhs)});
            detail = json{{"lhs", bound.lhs},
                          {"rhs", bound.rhs},
                          {"fuzzScale", bound.fuzzScale}};
            bool ok = bound.lhs <= bound.rhs + 1e-10;
            if (ok && s.epsilon && s.window) {
                const double rhsFluct =
                    shortFarrellyBound(s.rho, s.spec, *s.epsilon, *s.window, s.A);
                const McEstimate var = mcTimeAveragedVariance(s.rho, s.spec, s.A,
                                                              *s.window, s.samples, seed);
                detail["fluctuationBound"] = rhsFluct;
                detail["timeAveragedVariance"] = mcEstimateToJson(var, "timeAveragedVariance");
                ok = var.mean <= rhsFluct + 5.0 * var.stderror + 1e-9;
                if (!ok)
                    result.message = "time-averaged variance " + formatDouble(var.mean) +
                                     " exceeds fluctuation bound " +
                                     formatDouble(rhsFluct);
            } else if (!ok) {
                result.message = "single-time bound violated: lhs = " +
                                 formatDouble(bound.lhs) + " > rhs = " +
                                 formatDouble(bound.rhs);
            }
            if (!ok) {
                result.status = 3;
                json repro{{"config", config.raw}, {"detail", detail}};
                const auto path = options.outDir / (basename + "_repro.json");
                writeTextAtomic(repro.dump(2) + "\n", path);
                result.files.push_back(path);
            } else {
                result.message = "lhs = " + formatDouble(bound.lhs) +
                                 " <= rhs = " + formatDouble(bound.rhs);
            }
            break;
        }
    }

    writeCsvAtomic(table, csvPath);
    writeTextAtomic(detail.dump(2) + "\n", jsonPath);
    result.files.insert(result.files.begin(), {csvPath, jsonPath});
    return result;
}

std::string configSchemaText() {
    return R"(fuzzproc experiment configuration (JSON)

Top level:
  kind        required  "single-time" | "multi-time" | "sweep" | "montecarlo" | "choi-check"
  seed        optional  integer >= 0 (default 0; CLI --seed overrides)
  output      optional  artifact basename (default derived from kind)
  tolerances  optional  { "slack": number (default -1e-9), "duality": number (default 1e-10) }
  spec        required for multi-time / sweep / montecarlo / choi-check
  sweep       required for sweep:       { "parameter": "T"|"tau"|"k"|"dE"|"dGamma"|"family",
                                          "values": [ ... ] }
  samples     required for montecarlo:  integer >= 1
  singleTime  required for single-time (see below)

Unknown fields are rejected everywhere.

spec (two forms):
  1. Preset (random instance, deterministic in the run seed):
     { "preset": { "dE": int, "dS": int, "dGamma": int, "k": int (0..8),
                   "family": "uniformWindow"|"halfNormal"|"delta",
                   "tau": number >= 0, "T": number > 0,
                   "pure": bool, "perStepEnergies": bool,
                   "operationKind": "channel"|"weightedMeasurement"|"subChannel"|"identity",
                   "seed": int } }
     All fields optional; defaults: 2, 2, 1, 1, "uniformWindow", 1.0, 10.0,
     true, false, "channel", 0.
  2. Explicit:
     { "dims": { "dE": int, "dS": int, "dGamma": int (default 1) },
       "initialState":  <state on E*S>,
       "ancillaState":  <state on Gamma, optional, default |0><0|>,
       "hamiltonian":   <hamiltonian on E*S>,
       "steps":      [ { "distribution": <distribution>, "energies": [per level, optional] } ],
       "operations": [ <operation on S*Gamma> ]  (same length as steps) }

state:
  { "type": "matrix", "re": [[...]], "im": [[...]] (optional) }
  { "type": "randomPure",  "seed": int (optional) }
  { "type": "randomMixed", "seed": int (optional) }
  { "type": "maximallyMixed" }

hamiltonian:
  { "kind": "randomGaussianHermitian", "seed": int (optional) }
  { "kind": "heisenbergChain", "coupling": number, "field": number }  (dE*dS a power of 2)
  { "kind": "diagonalSpectrum", "energies": [dE*dS numbers] }
  { "kind": "matrix", "re": [[...]], "im": [[...]] (optional) }

distribution:
  { "family": "uniformWindow"|"halfNormal"|"delta", "tau": number >= 0, "T": number > 0 }
  "T" is required except for "delta" (where it is ignored).

operation:
  { "type": "identity" }
  { "type": "kraus", "weights": [a_mu], "kraus": [ { "re": [[...]], "im": [[...]] } ] }
  { "type": "randomChannel", "seed": int, "nKraus": int (default 2) }
  { "type": "randomWeightedMeasurement", "seed": int }
  { "type": "randomSubChannel", "seed": int, "nKraus": int, "scale": number in [0,1] }

singleTime:
  { "dims": { "dE": int, "dS": int },
    "hamiltonian": <hamiltonian>, "state": <state>,
    "observable": { "type": "matrix", ... } | { "type": "randomHermitian", "seed": int },
    "distribution": <distribution>,
    "epsilon": number > 0 (optional), "window": number > 0 (optional),
    "samples": int (optional, default 2000) }
  When both "epsilon" and "window" are given, the time-averaged fluctuation
  is estimated by Monte Carlo and compared against the analytic bound.

Outputs: <basename>.csv (fixed header per kind) and <basename>.json (detail).
CSV columns:
  multi-time / sweep: k,dE,dS,dGamma,family,T,lhs,termA,sumB,sumC,rhs,slack
  single-time:        dE,dS,family,tau,T,fuzzScale,lhs,rhs,slack
  montecarlo:         quantity,mean,stderr,n,seed
  choi-check:         k,dE,dS,dGamma,maxAbsDiff,choiTrace,traceExpected,minEigenvalue

Exit status: 0 all checks passed; 2 schema violation; 3 inequality violation
(a <basename>_repro.json artifact is written with the resolved instance).
)";
}

}  // namespace fuzzproc
