#include "pubflow/repository/repository.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/repository/ingest_format.hpp"
#include "pubflow/repository/mime.hpp"

#include <algorithm>

namespace pubflow::repository {

using nlohmann::json;

namespace {

constexpr std::string_view kObjectUpdated = "object.updated";
constexpr std::string_view kPidMinted = "pid.minted";

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Anchored match where '*' stands for any run of characters.
bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0, star = std::string_view::npos, resume = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            resume = t;
        } else if (p < pattern.size() && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++resume;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool matches(SearchOperator op, const std::string& value, const std::string& query) {
    switch (op) {
    case SearchOperator::eq: return value == query;
    case SearchOperator::has: {
        auto v = lower(value);
        auto q = lower(query);
        if (q.find('*') == std::string::npos) return v.find(q) != std::string::npos;
        return glob_match(q, v);
    }
    case SearchOperator::gt: return value > query;
    case SearchOperator::ge: return value >= query;
    case SearchOperator::lt: return value < query;
    case SearchOperator::le: return value <= query;
    }
    return false;
}

std::vector<std::string> field_values(const ObjectFields& f, const std::string& field) {
    if (field == "pid") return {f.pid};
    if (field == "label") return {f.label};
    if (field == "cDate") return {f.c_date};
    if (field == "mDate") return {f.m_date};
    return f.dc.field(field);
}

void check_field(const std::string& field) {
    if (is_dc_element(field)) return;
    if (std::find(kObjectSearchFields.begin(), kObjectSearchFields.end(), field) != kObjectSearchFields.end()) return;
    throw Error(Errc::UNKNOWN_FIELD, "unknown search field '" + field + "'");
}

} // namespace

Repository::Repository(Options options)
    : options_(std::move(options)),
      journal_(options_.data_dir / "repository", options_.journal),
      blobs_(options_.data_dir / "blobs") {
    if (!valid_namespace(options_.pid_namespace)) {
        throw Error(Errc::BAD_REQUEST, "invalid pid namespace '" + options_.pid_namespace + "'");
    }
    if (!options_.fetcher) options_.fetcher = std::make_shared<DefaultFetcher>();
    replay();
}

void Repository::replay() {
    auto recovered = journal_.recover();
    std::unique_lock lock(mu_);
    if (recovered.snapshot) {
        const auto& s = *recovered.snapshot;
        for (const auto& [ns, serial] : s.at("serials").items()) last_serial_[ns] = serial.get<std::uint64_t>();
        for (const auto& o : s.at("objects")) apply(object_from_json(o));
    }
    for (const auto& r : recovered.records) {
        if (r.kind == kObjectUpdated) {
            apply(object_from_json(r.payload.at("object")));
        } else if (r.kind == kPidMinted) {
            note_serial(Pid::parse(r.payload.at("pid").get<std::string>()));
        }
    }
}

void Repository::note_serial(const Pid& pid) {
    auto& last = last_serial_[pid.ns];
    last = std::max(last, pid.serial);
}

void Repository::apply(DigitalObject o) {
    note_serial(o.pid);
    auto key = o.pid.str();
    auto& slot = objects_[key];
    std::optional<std::string> old_dc;
    if (!slot) {
        slot = std::make_shared<Slot>();
    } else if (auto it = slot->committed.datastreams.find("DC"); it != slot->committed.datastreams.end()) {
        old_dc = it->second.latest().digest;
    }
    const auto& dc = o.datastreams.at("DC").latest();
    if (old_dc != dc.digest) slot->fields.dc = parse_dc_xml(as_chars(blobs_.get(dc.digest)));
    slot->fields.pid = key;
    slot->fields.label = o.label;
    slot->fields.c_date = format_iso8601(o.created_at);
    slot->fields.m_date = format_iso8601(o.modified_at);
    slot->committed = std::move(o);
}

void Repository::commit(const DigitalObject& updated) {
    std::unique_lock lock(mu_);
    journal_.append(kObjectUpdated, {{"object", to_json(updated)}});
    apply(updated);
    if (journal_.snapshot_due()) journal_.write_snapshot(journal_.last_seq(), state_locked());
}

json Repository::state_locked() const {
    json objects = json::array();
    for (const auto& [pid, s] : objects_) objects.push_back(to_json(s->committed));
    return {{"serials", last_serial_}, {"objects", std::move(objects)}};
}

json Repository::dump_state() const {
    std::shared_lock lock(mu_);
    return state_locked();
}

std::shared_ptr<Repository::Slot> Repository::slot(const std::string& pid) const {
    std::shared_lock lock(mu_);
    auto it = objects_.find(pid);
    if (it == objects_.end()) throw Error(Errc::UNKNOWN_PID, "unknown pid " + pid);
    return it->second;
}

Pid Repository::mint_locked() { return Pid{options_.pid_namespace, last_serial_[options_.pid_namespace] + 1}; }

Pid Repository::generate_pid() {
    std::unique_lock lock(mu_);
    auto pid = mint_locked();
    journal_.append(kPidMinted, {{"pid", pid.str()}});
    note_serial(pid);
    return pid;
}

Pid Repository::ingest(std::string_view object_xml, std::string_view format, const std::string& log_message) {
    if (format != kIngestFormat) {
        throw Error(Errc::UNSUPPORTED_FORMAT, "unsupported ingest format '" + std::string(format) + "'; expected " +
                                                  std::string(kIngestFormat));
    }
    auto parsed = parse_ingest_xml(object_xml);
    auto now = now_ms();

    DigitalObject o;
    o.label = parsed.label;
    o.content_model = parsed.content_model;
    o.created_at = o.modified_at = now;
    for (const auto& ds : parsed.datastreams) {
        DatastreamVersion v;
        v.version_no = 1;
        v.mime_type = ds.mime_type.value_or(std::string(kDefaultMime));
        v.digest = blobs_.put(ds.content);
        v.size = ds.content.size();
        v.log_message = log_message;
        v.created_at = now;
        o.datastreams[ds.id] = Datastream{ds.id, {std::move(v)}, DatastreamState::A};
    }

    std::unique_lock lock(mu_);
    o.pid = mint_locked();
    DublinCoreRecord dc;
    dc.field("identifier").push_back(o.pid.str());
    auto dc_xml = build_dc_xml(dc);
    DatastreamVersion v;
    v.version_no = 1;
    v.label = "Dublin Core Record";
    v.mime_type = "text/xml";
    v.digest = blobs_.put(to_bytes(dc_xml));
    v.size = dc_xml.size();
    v.log_message = log_message;
    v.created_at = now;
    o.datastreams["DC"] = Datastream{"DC", {std::move(v)}, DatastreamState::A};

    journal_.append(kObjectUpdated, {{"object", to_json(o)}});
    auto pid = o.pid;
    apply(std::move(o));
    if (journal_.snapshot_due()) journal_.write_snapshot(journal_.last_seq(), state_locked());
    return pid;
}

Bytes Repository::resolve(const DatastreamSource& source, std::optional<std::string>& reported_type) const {
    if (source.mode == SourceMode::by_value) {
        if (!source.content) throw Error(Errc::BAD_REQUEST, "byValue needs content");
        return *source.content;
    }
    if (!source.location || source.location->empty()) {
        throw Error(Errc::UNRESOLVABLE_LOCATION, "byReference needs a location");
    }
    auto fetched = options_.fetcher->get(*source.location);
    reported_type = fetched.content_type;
    return std::move(fetched.content);
}

void Repository::check_dc(const DigitalObject& o, std::span<const std::uint8_t> content) const {
    auto record = parse_dc_xml(as_chars(content));
    const auto& ids = record.field("identifier");
    if (std::find(ids.begin(), ids.end(), o.pid.str()) == ids.end()) {
        throw Error(Errc::SCHEMA_VIOLATION, "DC identifier must include " + o.pid.str(),
                    {{"path", "/dc/identifier"}, {"message", "missing " + o.pid.str()}});
    }
}

std::uint64_t Repository::modify_datastream(const std::string& pid, const std::string& ds_id,
                                            const DatastreamSource& source, const DatastreamProps& props,
                                            std::optional<DatastreamState> ds_state, const std::string& log_message,
                                            bool force) {
    auto s = slot(pid);
    std::lock_guard op(s->op);
    DigitalObject o;
    {
        std::shared_lock lock(mu_);
        o = s->committed;
    }
    auto it = o.datastreams.find(ds_id);
    if (it == o.datastreams.end()) throw Error(Errc::UNKNOWN_DATASTREAM, "object " + pid + " has no datastream " + ds_id);
    Datastream& ds = it->second;
    if (ds.state == DatastreamState::D && !force) {
        throw Error(Errc::STATE_CONFLICT, "datastream " + ds_id + " of " + pid + " is deleted; pass force to modify it");
    }
    const DatastreamVersion prev = ds.latest();

    DatastreamVersion v = prev;
    std::optional<std::string> reported;
    if (source.mode == SourceMode::by_value && !source.content) {
        v.control_mode = ControlMode::inline_content;
        v.location.reset();
    } else {
        auto content = resolve(source, reported);
        if (ds_id == "DC") check_dc(o, content);
        v.digest = blobs_.put(content);
        v.size = content.size();
        v.control_mode = source.mode == SourceMode::by_value ? ControlMode::inline_content : ControlMode::referenced;
        v.location = source.mode == SourceMode::by_value ? std::nullopt : source.location;
    }
    if (props.label) v.label = props.label;
    if (props.format_uri) v.format_uri = props.format_uri;
    if (props.alt_ids) v.alt_ids = *props.alt_ids;
    if (props.mime_type) {
        v.mime_type = *props.mime_type;
    } else if (source.mode == SourceMode::by_reference) {
        v.mime_type = reported ? *reported : mime_for_name(*source.location);
    }
    v.log_message = log_message;
    v.created_at = std::max(now_ms(), prev.created_at);

    if (props.versionable) {
        v.version_no = prev.version_no + 1;
        ds.versions.push_back(std::move(v));
    } else {
        ds.versions.back() = std::move(v);
    }
    if (ds_state) ds.state = *ds_state;
    o.modified_at = std::max(now_ms(), o.modified_at);
    auto version_no = ds.latest().version_no;
    commit(o);
    return version_no;
}

std::uint64_t Repository::add_datastream(const std::string& pid, const std::string& ds_id, const DatastreamSource& source,
                                         const DatastreamProps& props, const std::string& log_message) {
    if (!valid_datastream_id(ds_id)) throw Error(Errc::BAD_REQUEST, "malformed datastream id '" + ds_id + "'");
    auto s = slot(pid);
    std::lock_guard op(s->op);
    DigitalObject o;
    {
        std::shared_lock lock(mu_);
        o = s->committed;
    }
    if (o.datastreams.count(ds_id)) throw Error(Errc::DATASTREAM_EXISTS, "object " + pid + " already has datastream " + ds_id);

    std::optional<std::string> reported;
    auto content = resolve(source, reported);
    DatastreamVersion v;
    v.version_no = 1;
    v.label = props.label;
    v.format_uri = props.format_uri;
    v.alt_ids = props.alt_ids.value_or(std::vector<std::string>{});
    if (props.mime_type) v.mime_type = *props.mime_type;
    else if (reported) v.mime_type = *reported;
    else if (source.mode == SourceMode::by_reference) v.mime_type = mime_for_name(*source.location);
    else v.mime_type = kDefaultMime;
    v.control_mode = source.mode == SourceMode::by_value ? ControlMode::inline_content : ControlMode::referenced;
    if (source.mode == SourceMode::by_reference) v.location = source.location;
    v.digest = blobs_.put(content);
    v.size = content.size();
    v.log_message = log_message;
    v.created_at = std::max(now_ms(), o.modified_at);
    o.datastreams[ds_id] = Datastream{ds_id, {std::move(v)}, DatastreamState::A};
    o.modified_at = std::max(now_ms(), o.modified_at);
    commit(o);
    return 1;
}

bool Repository::ds_exists(const std::string& pid, const std::string& ds_id) const {
    auto s = slot(pid);
    std::shared_lock lock(mu_);
    auto it = s->committed.datastreams.find(ds_id);
    return it != s->committed.datastreams.end() && it->second.state != DatastreamState::D;
}

DatastreamContent Repository::get_datastream(const std::string& pid, const std::string& ds_id,
                                             std::optional<std::uint64_t> version_no) const {
    auto s = slot(pid);
    DatastreamVersion v;
    {
        std::shared_lock lock(mu_);
        auto it = s->committed.datastreams.find(ds_id);
        if (it == s->committed.datastreams.end()) {
            throw Error(Errc::UNKNOWN_DATASTREAM, "object " + pid + " has no datastream " + ds_id);
        }
        const auto& versions = it->second.versions;
        if (!version_no) {
            v = versions.back();
        } else {
            auto found = std::find_if(versions.begin(), versions.end(),
                                      [&](const DatastreamVersion& x) { return x.version_no == *version_no; });
            if (found == versions.end()) {
                throw Error(Errc::UNKNOWN_VERSION,
                            "datastream " + ds_id + " of " + pid + " has no version " + std::to_string(*version_no));
            }
            v = *found;
        }
    }
    auto content = blobs_.get(v.digest);
    return {std::move(v), std::move(content)};
}

DigitalObject Repository::get_object(const std::string& pid) const {
    auto s = slot(pid);
    std::shared_lock lock(mu_);
    return s->committed;
}

FieldSearchResult Repository::find_objects(const std::vector<SearchCondition>& conditions, std::size_t max_results) const {
    if (conditions.empty()) throw Error(Errc::BAD_REQUEST, "a search needs at least one condition");
    if (max_results < 1) throw Error(Errc::BAD_REQUEST, "maxResults must be positive");
    for (const auto& c : conditions) check_field(c.field);

    std::shared_lock lock(mu_);
    std::vector<const Slot*> ordered;
    ordered.reserve(objects_.size());
    for (const auto& [key, s] : objects_) ordered.push_back(s.get());
    std::sort(ordered.begin(), ordered.end(), [](const Slot* a, const Slot* b) {
        const auto& pa = a->committed.pid;
        const auto& pb = b->committed.pid;
        return std::tie(pa.serial, pa.ns) < std::tie(pb.serial, pb.ns);
    });

    FieldSearchResult out;
    for (const Slot* s : ordered) {
        bool all = std::all_of(conditions.begin(), conditions.end(), [&](const SearchCondition& c) {
            auto values = field_values(s->fields, c.field);
            return std::any_of(values.begin(), values.end(), [&](const std::string& v) { return matches(c.op, v, c.value); });
        });
        if (!all) continue;
        if (out.rows.size() == max_results) {
            out.complete = false;
            break;
        }
        out.rows.push_back(s->fields);
    }
    return out;
}

std::string Repository::detect_mime(const std::string& location_or_filename) const {
    if (location_or_filename.find("://") != std::string::npos) {
        if (auto reported = options_.fetcher->content_type(location_or_filename)) return *reported;
    }
    return mime_for_name(location_or_filename);
}

} // namespace pubflow::repository
