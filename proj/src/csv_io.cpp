#include "rankleak/csv_io.hpp"

#include <fstream>
#include <sstream>

namespace rankleak {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::Io, "invalid JSON in " + path.string());
    return j;
}

}  // namespace

Schema load_schema(const std::filesystem::path& path) { return schema_from_json(read_json_file(path)); }

void write_schema(const Schema& schema, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    // Declared order, so a reload yields the same schema.
    json attrs = json::array();
    const json internal = schema_to_json(schema)["attributes"];
    for (std::size_t i : schema.declared_order()) attrs.push_back(internal[i]);
    out << json{{"attributes", attrs}}.dump(2) << '\n';
}

Database read_csv(std::istream& in, std::shared_ptr<const Schema> schema) {
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::Io, "empty CSV");
    const auto header = split_row(line);
    std::vector<std::size_t> column_attr;
    std::vector<bool> seen(schema->arity(), false);
    for (const auto& name : header) {
        auto idx = schema->find(name);
        if (!idx) throw Error(Errc::SchemaMismatch, "column " + name + " is not in the schema");
        if (seen[*idx]) throw Error(Errc::SchemaMismatch, "column " + name + " appears twice");
        seen[*idx] = true;
        column_attr.push_back(*idx);
    }
    for (std::size_t i = 0; i < schema->arity(); ++i) {
        if (!seen[i]) throw Error(Errc::SchemaMismatch, "attribute " + schema->attribute(i).name + " has no column");
    }
    Database db(schema);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw Error(Errc::RaggedRow, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                             " cells, expected " + std::to_string(header.size()));
        }
        std::vector<Value> values(schema->arity());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::size_t attr = column_attr[c];
            const auto& desc = schema->attribute(attr);
            if (cells[c].empty()) {
                if (!desc.allows_null) {
                    throw Error(Errc::NullNotAllowed,
                                "row " + std::to_string(row) + ", column " + desc.name + ": empty cell on a non-null attribute");
                }
                values[attr] = kNull;
                continue;
            }
            auto v = schema->value_of(attr, cells[c]);
            if (!v) {
                throw Error(Errc::UnknownValue,
                            "row " + std::to_string(row) + ", column " + desc.name + ": \"" + cells[c] + "\" is not in the domain");
            }
            values[attr] = *v;
        }
        db.insert(std::move(values), Provenance::BonaFide, TupleId{row});
        ++row;
    }
    return db;
}

Database load_csv(const std::filesystem::path& data, const std::filesystem::path& schema_path) {
    auto schema = std::make_shared<const Schema>(load_schema(schema_path));
    std::ifstream in(data);
    if (!in) throw Error(Errc::Io, "cannot open " + data.string());
    return read_csv(in, schema);
}

void write_csv(const Database& db, std::ostream& out) {
    const Schema& schema = db.schema();
    const auto order = schema.declared_order();
    for (std::size_t c = 0; c < order.size(); ++c) out << (c ? "," : "") << quote(schema.attribute(order[c]).name);
    out << '\n';
    for (const Tuple& t : db.tuples()) {
        for (std::size_t c = 0; c < order.size(); ++c) {
            if (c) out << ',';
            const Value v = t.values[order[c]];
            if (v != kNull) out << quote(schema.attribute(order[c]).domain[static_cast<std::size_t>(v)]);
        }
        out << '\n';
    }
}

void write_csv(const Database& db, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    write_csv(db, out);
}

RankingWeights weights_from_json(const json& j, const Schema& schema) {
    RankingWeights w = RankingWeights::uniform(schema);
    auto apply = [&](const char* section, Visibility vis) {
        if (!j.contains(section)) return;
        for (const auto& [name, value] : j[section].items()) {
            auto idx = schema.find(name);
            if (!idx || (schema.is_public(*idx) != (vis == Visibility::Public))) {
                throw Error(Errc::InvalidArgument, std::string("weight for unknown ") + section + " attribute " + name);
            }
            const double x = value.get<double>();
            if (vis == Visibility::Public) {
                w.public_weights[*idx] = x;
            } else {
                w.private_weights[*idx - schema.public_count()] = x;
            }
        }
    };
    apply("public", Visibility::Public);
    apply("private", Visibility::Private);
    w.check(schema);
    return w;
}

json weights_to_json(const RankingWeights& w, const Schema& schema) {
    json pub = json::object(), priv = json::object();
    for (std::size_t i = 0; i < schema.public_count(); ++i) pub[schema.attribute(i).name] = w.public_weights[i];
    for (std::size_t j = 0; j < schema.private_count(); ++j) {
        priv[schema.attribute(schema.private_index(j)).name] = w.private_weights[j];
    }
    return json{{"public", pub}, {"private", priv}};
}

}  // namespace rankleak
