#include "gradpower/tensor_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gradpower/errors.hpp"

namespace gradpower {

namespace {

using nlohmann::json;

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw DomainError(where + ": expected a number");
    return j.get<double>();
}

const json& array_of(const json& j, std::size_t size, const std::string& where)
{
    if (!j.is_array() || j.size() != size) {
        throw DomainError(where + ": expected an array of length " + std::to_string(size));
    }
    return j;
}

Tensor3<double> read_tensor(const json& j, Eigen::Index p, const std::string& name)
{
    const auto np = static_cast<std::size_t>(p);
    Tensor3<double> t(p, p, p);
    array_of(j, np, name);
    for (Eigen::Index r = 0; r < p; ++r) {
        const auto& jr = array_of(j[r], np, name + "[" + std::to_string(r) + "]");
        for (Eigen::Index s = 0; s < p; ++s) {
            const std::string w = name + "[" + std::to_string(r) + "][" + std::to_string(s) + "]";
            const auto& js = array_of(jr[s], np, w);
            for (Eigen::Index u = 0; u < p; ++u) t(r, s, u) = number(js[u], w);
        }
    }
    return t;
}

json write_tensor(const Tensor3<double>& t)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < t.dimension(0); ++r) {
        json jr = json::array();
        for (Eigen::Index s = 0; s < t.dimension(1); ++s) {
            json js = json::array();
            for (Eigen::Index u = 0; u < t.dimension(2); ++u) js.push_back(t(r, s, u));
            jr.push_back(js);
        }
        out.push_back(jr);
    }
    return out;
}

} // namespace

CumulantTensors<double> parse_tensors(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("tensor file: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("tensor file: expected a JSON object");
    for (const char* key : {"p", "q", "K", "k3", "k21"}) {
        if (!j.contains(key)) throw DomainError(std::string("tensor file: missing field '") + key + "'");
    }
    if (!j["p"].is_number_integer() || !j["q"].is_number_integer()) {
        throw DomainError("tensor file: p and q must be integers");
    }
    CumulantTensors<double> t;
    t.p = j["p"].get<Eigen::Index>();
    t.q = j["q"].get<Eigen::Index>();
    if (t.p < 1 || t.p > 64) throw DomainError("tensor file: p must be in [1, 64]");
    const auto np = static_cast<std::size_t>(t.p);
    t.K.resize(t.p, t.p);
    array_of(j["K"], np, "K");
    for (Eigen::Index r = 0; r < t.p; ++r) {
        const auto& row = array_of(j["K"][r], np, "K[" + std::to_string(r) + "]");
        for (Eigen::Index s = 0; s < t.p; ++s) t.K(r, s) = number(row[s], "K");
    }
    t.k3 = read_tensor(j["k3"], t.p, "k3");
    t.k21 = read_tensor(j["k21"], t.p, "k21");
    if (j.contains("k111") && !j["k111"].is_null()) t.k111 = read_tensor(j["k111"], t.p, "k111");
    validate(t);
    return t;
}

CumulantTensors<double> read_tensor_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open tensor file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tensors(buf.str());
}

std::string dump_tensors(const CumulantTensors<double>& t)
{
    json j;
    j["p"] = t.p;
    j["q"] = t.q;
    json k = json::array();
    for (Eigen::Index r = 0; r < t.p; ++r) {
        json row = json::array();
        for (Eigen::Index s = 0; s < t.p; ++s) row.push_back(t.K(r, s));
        k.push_back(row);
    }
    j["K"] = k;
    j["k3"] = write_tensor(t.k3);
    j["k21"] = write_tensor(t.k21);
    if (t.k111) j["k111"] = write_tensor(*t.k111);
    return j.dump(2);
}

} // namespace gradpower
