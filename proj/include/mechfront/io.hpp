#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechfront/frontier.hpp"
#include "mechfront/mechanisms.hpp"

namespace mechfront {

namespace io_detail {

using nlohmann::json;

inline json rat_json(const Rat& r) {
    Rat c = r;
    return json{{"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}};
}

inline Rat rat_from_json(const json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw InvalidSettingError("rational must be an object with num/den");
    return parse_rat(j.at("num").get<std::string>() + "/" + j.at("den").get<std::string>());
}

inline const char* kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::Strict: return "strict";
        case SpaceKind::Weak: return "weak";
        default: return "explicit";
    }
}

inline json space_descriptor(const ProfileSpace& space) {
    json j{{"n", space.setting().n}, {"m", space.setting().m}, {"kind", kind_name(space.kind())}};
    if (space.kind() == SpaceKind::ExplicitList) {
        json profs = json::array();
        for (int p = 0; p < space.size(); ++p) {
            json prof = json::array();
            for (const PrefOrder& o : space.profile(p).orders) prof.push_back(o.classes());
            profs.push_back(std::move(prof));
        }
        j["profiles"] = std::move(profs);
    }
    return j;
}

inline void check_descriptor(const json& j, const ProfileSpace& space) {
    if (j.at("n").get<int>() != space.setting().n || j.at("m").get<int>() != space.setting().m ||
        j.at("kind").get<std::string>() != kind_name(space.kind()))
        throw SpaceMismatchError("mechanism file was produced for a different profile space");
}

/// Parses "num,den"-style CSV cells into a table of rationals per profile.
inline std::vector<std::vector<Rat>> parse_profile_alt_csv(const std::string& text,
                                                           const ProfileSpace& space,
                                                           const char* what) {
    const int m = space.setting().m;
    std::vector<std::vector<Rat>> table(space.size(), std::vector<Rat>(m));
    std::vector<std::vector<char>> seen(space.size(), std::vector<char>(m, 0));
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (first) {  // tolerate a header row
            first = false;
            if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
        }
        std::istringstream cells(line);
        std::string c0, c1, c2, c3;
        if (!std::getline(cells, c0, ',') || !std::getline(cells, c1, ',') ||
            !std::getline(cells, c2, ',') || !std::getline(cells, c3))
            throw InvalidSettingError(std::string(what) + " CSV row needs 4 columns");
        while (!c3.empty() && (c3.back() == '\r' || c3.back() == ' ')) c3.pop_back();
        const int p = std::stoi(c0), j = std::stoi(c1);
        if (p < 0 || p >= space.size() || j < 0 || j >= m)
            throw InvalidSettingError(std::string(what) + " CSV index out of range");
        if (seen[p][j]) throw InvalidSettingError(std::string(what) + " CSV duplicate entry");
        seen[p][j] = 1;
        table[p][j] = parse_rat(c2 + "/" + c3);
    }
    for (const auto& row : seen)
        for (char s : row)
            if (!s) throw InvalidSettingError(std::string(what) + " CSV is missing entries");
    return table;
}

}  // namespace io_detail

inline std::string export_mechanism_json(const Mechanism& mech) {
    using io_detail::json;
    json j{{"space", io_detail::space_descriptor(mech.space())}};
    json rows = json::array();
    for (int p = 0; p < mech.space().size(); ++p) {
        json row = json::array();
        for (const Rat& q : mech.outcome(p).probs) row.push_back(io_detail::rat_json(q));
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

inline Mechanism import_mechanism_json(const std::string& text, const ProfileSpace& space) {
    using io_detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidSettingError(std::string("mechanism JSON malformed: ") + e.what());
    }
    io_detail::check_descriptor(j.at("space"), space);
    const auto& rows = j.at("rows");
    if (static_cast<int>(rows.size()) != space.size())
        throw SpaceMismatchError("mechanism row count differs from the profile space");
    std::vector<Outcome> table;
    table.reserve(space.size());
    for (const auto& row : rows) {
        std::vector<Rat> probs;
        for (const auto& cell : row) probs.push_back(io_detail::rat_from_json(cell));
        table.push_back(Outcome(std::move(probs)));
    }
    return Mechanism(space, std::move(table));
}

inline std::string export_mechanism_csv(const Mechanism& mech) {
    std::ostringstream os;
    os << "profile_index,alternative,num,den\n";
    for (int p = 0; p < mech.space().size(); ++p)
        for (int j = 0; j < mech.space().setting().m; ++j) {
            Rat q = mech.prob(p, j);
            os << p << "," << j << "," << q.get_num().get_str() << "," << q.get_den().get_str()
               << "\n";
        }
    return os.str();
}

inline Mechanism import_mechanism_csv(const std::string& text, const ProfileSpace& space) {
    auto table = io_detail::parse_profile_alt_csv(text, space, "mechanism");
    std::vector<Outcome> rows;
    rows.reserve(table.size());
    for (auto& r : table) rows.push_back(Outcome(std::move(r)));
    return Mechanism(space, std::move(rows));
}

inline DesideratumFn import_desideratum_csv(const std::string& text, const ProfileSpace& space) {
    auto table = io_detail::parse_profile_alt_csv(text, space, "desideratum");
    return DesideratumFn(space, std::move(table));
}

/// Frontier JSON: supporting bounds with deficits, segment slopes, LP-call
/// count, and the file names the representatives are exported under.
inline std::string export_frontier_json(const ParetoFrontier& frontier) {
    using io_detail::json;
    json bounds = json::array();
    for (const auto& pt : frontier.points)
        bounds.push_back(json{{"eps", io_detail::rat_json(pt.eps)},
                              {"deficit", io_detail::rat_json(pt.deficit)}});
    json slopes = json::array();
    for (size_t i = 0; i + 1 < frontier.points.size(); ++i) {
        const auto &a = frontier.points[i], &b = frontier.points[i + 1];
        slopes.push_back(io_detail::rat_json(Rat((b.deficit - a.deficit) / (b.eps - a.eps))));
    }
    json mechs = json::array();
    for (size_t i = 0; i < frontier.points.size(); ++i)
        mechs.push_back("mech_" + std::to_string(i) + ".json");
    return json{{"bounds", std::move(bounds)},
                {"slopes", std::move(slopes)},
                {"lp_calls", frontier.lp_calls},
                {"representatives", std::move(mechs)}}
               .dump(2) +
           "\n";
}

inline std::string export_frontier_csv(const ParetoFrontier& frontier) {
    std::ostringstream os;
    os << "eps_num,eps_den,deficit_num,deficit_den\n";
    for (const auto& pt : frontier.points) {
        Rat e = pt.eps, d = pt.deficit;
        os << e.get_num().get_str() << "," << e.get_den().get_str() << ","
           << d.get_num().get_str() << "," << d.get_den().get_str() << "\n";
    }
    return os.str();
}

/// grid+1 evenly spaced samples of (eps, delta(eps)) over [0, eps_bar],
/// interpolated from the stored frontier without further solves.
inline std::string export_frontier_samples_csv(const ParetoFrontier& frontier, int grid) {
    if (grid < 1) throw InvalidSettingError("sample grid must be positive");
    const Rat hi = frontier.points.back().eps;
    std::ostringstream os;
    os << "eps_num,eps_den,deficit_num,deficit_den\n";
    for (int i = 0; i <= grid; ++i) {
        Rat e = hi * Rat(i) / Rat(grid);
        Rat d = delta_at(frontier, e);
        os << e.get_num().get_str() << "," << e.get_den().get_str() << ","
           << d.get_num().get_str() << "," << d.get_den().get_str() << "\n";
    }
    return os.str();
}

}  // namespace mechfront
