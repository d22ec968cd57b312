#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace haznav {

/// One camera frame. The semantic channel is the simulator's oracle ground
/// truth (entity label id per pixel, -1 = background); live camera input
/// leaves it empty.
struct SceneImage {
    double timestamp{0.0};
    long tick{0};
    int width{0};
    int height{0};
    std::vector<std::uint8_t> rgb;       // 3 bytes per pixel, row-major
    std::vector<int> semantic;           // label id per pixel, -1 = none
    std::vector<std::string> label_names;  // id -> label string

    bool has_semantic() const { return !semantic.empty(); }

    std::string label_at(std::size_t pixel) const {
        const int id = semantic[pixel];
        if (id < 0 || id >= static_cast<int>(label_names.size())) return {};
        return label_names[id];
    }

    /// Distinct labels visible in the frame, sorted.
    std::vector<std::string> visible_labels() const {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < semantic.size(); ++i) {
            auto l = label_at(i);
            if (!l.empty()) seen.insert(std::move(l));
        }
        return {seen.begin(), seen.end()};
    }
};

/// Structured output of the hazard reasoner: scene description, every object
/// seen, the chain of reasoning, and the refined hazardous-object list.
struct HazardReport {
    std::string textual_description;
    std::vector<std::string> object_list;
    std::string hazard_reasoning;
    std::vector<std::string> hazardous_objects;

    bool schema_complete() const {
        for (const auto& h : hazardous_objects) {
            if (std::find(object_list.begin(), object_list.end(), h) == object_list.end())
                return false;
        }
        return true;
    }
};

/// Output of the emotion evaluator: one anxiety score in {1,2,3} per
/// hazardous object, plus a short justification each.
struct AnxietyAssessment {
    std::map<std::string, int> scores;
    std::map<std::string, std::string> justifications;
};

/// System prompts and output-schema descriptors for the two reasoning stages.
struct PromptSet {
    std::string hazard_prompt;
    std::string emotion_prompt;
    std::string hazard_schema;
    std::string emotion_schema;
};

class MalformedResponse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pluggable two-stage reasoning backend.
class HazardBackend {
public:
    virtual ~HazardBackend() = default;
    virtual HazardReport reason_hazards(const SceneImage& image, const PromptSet& prompts) = 0;
    virtual AnxietyAssessment evaluate_emotion(const std::string& reasoning,
                                               const std::vector<std::string>& hazards,
                                               const SceneImage& image,
                                               const PromptSet& prompts) = 0;
};

/// Fixture entry: how the mock reasons about one visible label.
struct HazardFixture {
    std::string label;
    int anxiety{1};
    std::string reasoning;
    std::string justification;
};

/// Deterministic scripted backend, canonical for tests: identical frame
/// label-sets yield byte-identical reports and scores. Labels without a
/// fixture are reported as objects but never as hazards.
class MockHazardBackend : public HazardBackend {
public:
    MockHazardBackend() = default;
    explicit MockHazardBackend(std::vector<HazardFixture> fixtures) {
        for (auto& f : fixtures) fixtures_[f.label] = std::move(f);
    }

    /// Makes the next n backend calls throw, to exercise retain-on-failure.
    void fail_next_calls(int n) { fail_calls_ = n; }

    HazardReport reason_hazards(const SceneImage& image, const PromptSet&) override {
        consume_failure();
        HazardReport report;
        report.object_list = image.visible_labels();
        report.textual_description = describe(report.object_list);
        for (const auto& label : report.object_list) {
            auto it = fixtures_.find(label);
            if (it == fixtures_.end()) continue;
            report.hazardous_objects.push_back(label);
            if (!report.hazard_reasoning.empty()) report.hazard_reasoning += " ";
            report.hazard_reasoning += it->second.reasoning;
        }
        if (report.hazard_reasoning.empty())
            report.hazard_reasoning = "No hazardous objects identified.";
        return report;
    }

    AnxietyAssessment evaluate_emotion(const std::string&, const std::vector<std::string>& hazards,
                                       const SceneImage&, const PromptSet&) override {
        consume_failure();
        AnxietyAssessment out;
        for (const auto& label : hazards) {
            auto it = fixtures_.find(label);
            const int raw = it == fixtures_.end() ? 1 : it->second.anxiety;
            out.scores[label] = std::clamp(raw, 1, 3);
            out.justifications[label] =
                it == fixtures_.end() ? "Unknown object, treated as mild." : it->second.justification;
        }
        return out;
    }

private:
    static std::string describe(const std::vector<std::string>& labels) {
        if (labels.empty()) return "An empty scene with no recognizable objects.";
        std::string d = "A scene containing: ";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) d += ", ";
            d += labels[i];
        }
        d += ".";
        return d;
    }

    void consume_failure() {
        if (fail_calls_ > 0) {
            --fail_calls_;
            throw std::runtime_error("mock backend failure (scripted)");
        }
    }

    std::map<std::string, HazardFixture> fixtures_;
    int fail_calls_{0};
};

/// The latest completed (report, assessment) pair, stamped with the tick and
/// time of the frame it was computed from.
struct HazardAssessmentSnapshot {
    HazardReport report;
    AnxietyAssessment assessment;
    long capture_tick{-1};
    double capture_time{0.0};
    double publish_time{0.0};
};

/// The slow reasoning loop. Each inference captures the freshest frame and
/// publishes its result `latency` seconds later on the same clock, so
/// downstream consumers between publications keep reading the stale pair
/// (the paper's t+k asynchrony). Backend failures keep the previous result.
class HazardCycle {
public:
    HazardCycle(std::shared_ptr<HazardBackend> backend, PromptSet prompts, double latency_s)
        : backend_(std::move(backend)), prompts_(std::move(prompts)), latency_(latency_s) {
        if (latency_ < 0.0) throw std::invalid_argument("HazardCycle: latency must be >= 0");
    }

    /// Advances the cycle to time `now` with the freshest frame. Deterministic.
    void step(double now, const SceneImage& frame) {
        if (in_flight_ && now >= in_flight_->due_time) {
            finish_inference(now);
        }
        if (!in_flight_) {
            begin_inference(now, frame);
            if (latency_ == 0.0) finish_inference(now);
        }
    }

    const std::optional<HazardAssessmentSnapshot>& current() const { return latest_; }

    long completed_inferences() const { return completed_; }
    long failed_inferences() const { return failed_; }

private:
    struct InFlight {
        SceneImage frame;
        double start_time{0.0};
        double due_time{0.0};
    };

    void begin_inference(double now, const SceneImage& frame) {
        in_flight_ = InFlight{frame, now, now + latency_};
    }

    void finish_inference(double now) {
        InFlight job = std::move(*in_flight_);
        in_flight_.reset();
        try {
            HazardAssessmentSnapshot snap;
            snap.report = backend_->reason_hazards(job.frame, prompts_);
            if (!snap.report.hazardous_objects.empty()) {
                snap.assessment = backend_->evaluate_emotion(
                    snap.report.hazard_reasoning, snap.report.hazardous_objects, job.frame, prompts_);
            }
            snap.capture_tick = job.frame.tick;
            snap.capture_time = job.frame.timestamp;
            snap.publish_time = now;
            latest_ = std::move(snap);
            ++completed_;
        } catch (const std::exception&) {
            ++failed_;  // previous result retained, cycle continues
        }
    }

    std::shared_ptr<HazardBackend> backend_;
    PromptSet prompts_;
    double latency_;
    std::optional<InFlight> in_flight_;
    std::optional<HazardAssessmentSnapshot> latest_;
    long completed_{0};
    long failed_{0};
};

/// Wall-clock variant for live demos: inference runs on a worker thread and
/// results are swapped in atomically. Excluded from deterministic tests.
class AsyncHazardCycle {
public:
    using FrameProvider = std::function<SceneImage()>;

    AsyncHazardCycle(std::shared_ptr<HazardBackend> backend, PromptSet prompts, FrameProvider provider)
        : backend_(std::move(backend)), prompts_(std::move(prompts)), provider_(std::move(provider)) {}

    ~AsyncHazardCycle() { stop(); }

    void start() {
        if (worker_.joinable()) return;
        running_ = true;
        worker_ = std::thread([this] { loop(); });
    }

    void stop() {
        running_ = false;
        if (worker_.joinable()) worker_.join();
    }

    std::shared_ptr<const HazardAssessmentSnapshot> current() const {
        return std::atomic_load(&latest_);
    }

private:
    void loop() {
        while (running_) {
            SceneImage frame = provider_();
            try {
                auto snap = std::make_shared<HazardAssessmentSnapshot>();
                snap->report = backend_->reason_hazards(frame, prompts_);
                if (!snap->report.hazardous_objects.empty()) {
                    snap->assessment = backend_->evaluate_emotion(
                        snap->report.hazard_reasoning, snap->report.hazardous_objects, frame, prompts_);
                }
                snap->capture_tick = frame.tick;
                snap->capture_time = frame.timestamp;
                std::atomic_store(&latest_, std::shared_ptr<const HazardAssessmentSnapshot>(snap));
            } catch (const std::exception&) {
                // keep previous
            }
        }
    }

    std::shared_ptr<HazardBackend> backend_;
    PromptSet prompts_;
    FrameProvider provider_;
    std::atomic<bool> running_{false};
    std::thread worker_;
    std::shared_ptr<const HazardAssessmentSnapshot> latest_;
};

}  // namespace haznav
