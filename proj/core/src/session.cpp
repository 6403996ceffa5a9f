#include "uscut/session.hpp"

#include "uscut/error.hpp"
#include "uscut/image_io.hpp"
#include "uscut/result_io.hpp"
#include "uscut/segment.hpp"

#include <chrono>
#include <istream>
#include <ostream>
#include <vector>

namespace uscut {
namespace {

using Clock = std::chrono::steady_clock;

double number_field(const nlohmann::json& m, const char* key)
{
    if (!m.contains(key) || !m[key].is_number()) {
        throw InvalidArgument(std::string("missing numeric field '") + key + "'");
    }
    return m[key].get<double>();
}

nlohmann::json points_json(const std::vector<Point2>& points)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : points) {
        out.push_back({p.x, p.y});
    }
    return out;
}

} // namespace

struct Session::State {
    std::optional<GrayImage> image;
    std::filesystem::path image_path;
    std::optional<SeedPoint> seed;
    std::vector<HelperSeed> helpers;
    std::optional<SegmentationResult> result;
    std::optional<Clock::time_point> first_move;
    std::optional<double> interaction_time_s;
};

Session::Session(std::string id, TemplateConfig cfg, MessageSink sink)
    : id_(std::move(id)), cfg_(std::move(cfg)), sink_(std::move(sink)), state_(std::make_unique<State>())
{
    cfg_.validate();
    worker_ = std::thread([this] { run(); });
}

Session::~Session()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    worker_.join();
}

void Session::submit(const nlohmann::json& message)
{
    if (!message.is_object() || message.value("v", 0) != kProtocolVersion) {
        fail(message, "unsupported or missing protocol version");
        return;
    }
    if (!message.contains("kind") || !message["kind"].is_string()) {
        fail(message, "missing kind");
        return;
    }
    if (!message.contains("seq") || !message["seq"].is_number_integer()) {
        fail(message, "missing integer seq");
        return;
    }
    {
        std::lock_guard lock(mutex_);
        const auto seq = message["seq"].get<std::int64_t>();
        if (last_seq_ && seq <= *last_seq_) {
            // Answering with this seq would break the monotone reply order.
            nlohmann::json err = {{"v", kProtocolVersion}, {"kind", "error"}, {"session", id_},
                                  {"reason", "seq must increase"}, {"rejected_seq", seq}};
            sink_(err);
            return;
        }
        last_seq_ = seq;
        queue_.push_back(message);
    }
    wake_.notify_one();
}

void Session::submit_text(const std::string& text)
{
    nlohmann::json message;
    try {
        message = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        fail(nlohmann::json::object(), "malformed JSON");
        return;
    }
    submit(message);
}

void Session::wait_idle()
{
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return queue_.empty() && !busy_; });
}

void Session::run()
{
    std::unique_lock lock(mutex_);
    for (;;) {
        wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_) {
            return;
        }
        nlohmann::json message = std::move(queue_.front());
        queue_.pop_front();
        const bool superseded = message["kind"] == "seed_move" && !queue_.empty() &&
                                queue_.front()["kind"] == "seed_move";
        if (!superseded) {
            busy_ = true;
            lock.unlock();
            process(message);
            lock.lock();
            busy_ = false;
        }
        if (queue_.empty()) {
            idle_.notify_all();
        }
    }
}

void Session::reply(nlohmann::json message)
{
    message["v"] = kProtocolVersion;
    message["session"] = id_;
    sink_(message);
}

void Session::fail(const nlohmann::json& request, const std::string& reason)
{
    nlohmann::json err = {{"kind", "error"}, {"reason", reason}};
    if (request.is_object() && request.contains("seq")) {
        err["seq"] = request["seq"];
    }
    if (request.is_object() && request.contains("kind")) {
        err["request"] = request["kind"];
    }
    reply(std::move(err));
}

void Session::process(const nlohmann::json& message)
{
    State& st = *state_;
    const std::string kind = message["kind"].get<std::string>();
    const auto seq = message["seq"];

    auto result_message = [&] {
        const SegmentationResult& r = *st.result;
        nlohmann::json helpers = nlohmann::json::array();
        for (const auto& h : st.helpers) {
            helpers.push_back({h.x, h.y});
        }
        return nlohmann::json{
            {"kind", "result"},
            {"seq", seq},
            {"seed", {st.seed->x, st.seed->y}},
            {"helpers", helpers},
            {"contour", points_json(r.contour.vertices)},
            {"cut_index", r.cut_index},
            {"cut_radius_px", r.cut_radius},
            {"diameter_a_mm", r.diameter_a},
            {"diameter_b_mm", r.diameter_b},
            {"axis_a", {r.axis_a.x, r.axis_a.y}},
            {"elapsed_ms", r.elapsed_ms},
        };
    };
    auto require_image = [&] {
        if (!st.image) {
            throw InvalidArgument("no image loaded");
        }
    };

    try {
        if (kind == "load") {
            if (!message.contains("image") || !message["image"].is_string()) {
                throw InvalidArgument("load needs an image path");
            }
            std::optional<double> spacing;
            if (message.contains("spacing_mm_per_px")) {
                spacing = number_field(message, "spacing_mm_per_px");
            }
            std::filesystem::path path = message["image"].get<std::string>();
            GrayImage image = load_image(path, spacing);
            *state_ = State{};
            st.image = std::move(image);
            st.image_path = std::move(path);
            reply({{"kind", "load"},
                   {"seq", seq},
                   {"width", st.image->width()},
                   {"height", st.image->height()},
                   {"spacing_mm_per_px", st.image->spacing()}});
        } else if (kind == "seed_move") {
            require_image();
            const SeedPoint seed{number_field(message, "x"), number_field(message, "y")};
            if (!st.image->contains(seed.x, seed.y)) {
                throw InvalidArgument("seed outside image");
            }
            if (!st.first_move) {
                st.first_move = Clock::now();
            }
            SegmentationResult r = segment(*st.image, seed, st.helpers, cfg_);
            st.seed = seed;
            st.result = std::move(r);
            reply(result_message());
        } else if (kind == "helper_add" || kind == "helper_clear") {
            require_image();
            std::vector<HelperSeed> helpers;
            if (kind == "helper_add") {
                const HelperSeed h{number_field(message, "x"), number_field(message, "y")};
                if (!st.image->contains(h.x, h.y)) {
                    throw InvalidArgument("helper seed outside image");
                }
                helpers = st.helpers;
                helpers.push_back(h);
            }
            if (st.seed) {
                SegmentationResult r = segment(*st.image, *st.seed, helpers, cfg_);
                st.helpers = std::move(helpers);
                st.result = std::move(r);
                reply(result_message());
            } else {
                st.helpers = std::move(helpers);
                reply({{"kind", kind}, {"seq", seq}, {"helpers", st.helpers.size()}});
            }
        } else if (kind == "accept") {
            if (!st.result) {
                throw InvalidArgument("no result to accept");
            }
            if (!message.contains("out") || !message["out"].is_string()) {
                throw InvalidArgument("accept needs an output directory");
            }
            const std::filesystem::path out = message["out"].get<std::string>();
            if (!st.interaction_time_s) {
                const auto start = st.first_move.value_or(Clock::now());
                st.interaction_time_s = std::chrono::duration<double>(Clock::now() - start).count();
            }
            const SeedFile seeds{*st.seed, st.helpers};
            write_result(out, *st.result, *st.image, seeds, cfg_);
            write_seed_file(out / "seeds.txt", seeds);
            const nlohmann::json record = {
                {"case_id", id_},
                {"image", st.image_path.generic_string()},
                {"seeds", "seeds.txt"},
                {"satisfied", true},
                {"interaction_time_s", *st.interaction_time_s},
                {"config_fingerprint", cfg_.fingerprint()},
            };
            write_text_file(out / "session.json", record.dump(2) + "\n");
            reply({{"kind", "accept"},
                   {"seq", seq},
                   {"out", out.generic_string()},
                   {"diameter_a_mm", st.result->diameter_a},
                   {"diameter_b_mm", st.result->diameter_b},
                   {"interaction_time_s", *st.interaction_time_s}});
        } else {
            throw InvalidArgument("unknown kind '" + kind + "'");
        }
    } catch (const std::exception& e) {
        fail(message, e.what());
    }
}

SessionService::SessionService(TemplateConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
}

void SessionService::handle_line(const std::string& line, const MessageSink& sink)
{
    nlohmann::json message;
    try {
        message = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
        sink({{"v", kProtocolVersion}, {"kind", "error"}, {"reason", "malformed JSON"}});
        return;
    }
    handle(message, sink);
}

void SessionService::handle(const nlohmann::json& message, const MessageSink& sink)
{
    std::string id = "default";
    if (message.is_object() && message.contains("session")) {
        if (!message["session"].is_string()) {
            sink({{"v", kProtocolVersion}, {"kind", "error"}, {"reason", "session must be a string"}});
            return;
        }
        id = message["session"].get<std::string>();
    }
    Session* session = nullptr;
    {
        std::lock_guard lock(mutex_);
        auto& slot = sessions_[id];
        if (!slot) {
            slot = std::make_unique<Session>(id, cfg_, sink);
        }
        session = slot.get();
    }
    session->submit(message);
}

void SessionService::wait_idle()
{
    std::vector<Session*> all;
    {
        std::lock_guard lock(mutex_);
        for (auto& [id, s] : sessions_) {
            all.push_back(s.get());
        }
    }
    for (auto* s : all) {
        s->wait_idle();
    }
}

std::size_t SessionService::session_count() const
{
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

void SessionService::serve_stdio(std::istream& in, std::ostream& out)
{
    std::mutex out_mutex;
    const MessageSink sink = [&](const nlohmann::json& m) {
        std::lock_guard lock(out_mutex);
        out << encode_message(m) << '\n' << std::flush;
    };
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        handle_line(line, sink);
    }
    wait_idle();
    // The sessions captured `sink`, which dies with this frame.
    std::lock_guard lock(mutex_);
    sessions_.clear();
}

std::string encode_message(const nlohmann::json& message)
{
    return message.dump();
}

} // namespace uscut
