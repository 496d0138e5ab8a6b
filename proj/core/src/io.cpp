#include "drmg/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace drmg {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed: " + path.string());
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "'");
  return j.at(key);
}

void expect_size(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) {
    throw std::invalid_argument(where + ": expected an array of length " + std::to_string(n));
  }
}

RadiusOverride parse_override(const json& o, const JointActionSpace& space) {
  RadiusOverride r;
  r.agent = o.value("agent", -1);
  r.h = field(o, "h").get<int>();
  r.s = field(o, "s").get<int>();
  if (o.contains("a")) {
    const auto& a = o.at("a");
    if (a.is_array()) {
      const auto profile = a.get<std::vector<int>>();
      r.joint_action = joint_index(profile, space.actions_per_agent());
    } else {
      r.joint_action = a.get<int>();
    }
  }
  r.sigma = field(o, "sigma").get<double>();
  return r;
}

void read_radii(const json& radii, GameSpec& spec) {
  const int m = spec.num_agents();
  auto read_overrides = [&](const json& list) {
    for (const auto& o : list) spec.add_radius_override(parse_override(o, spec.joint_space()));
  };
  if (radii.is_object()) {
    if (radii.contains("base")) {
      const auto& base = radii.at("base");
      expect_size(base, m, "radii.base");
      for (int i = 0; i < m; ++i) spec.set_base_radius(i, base[i].get<double>());
    }
    if (radii.contains("overrides")) read_overrides(radii.at("overrides"));
    return;
  }
  if (!radii.is_array()) throw std::invalid_argument("radii must be a list or an object");
  if (!radii.empty() && radii.front().is_object()) {
    read_overrides(radii);
    return;
  }
  if (radii.size() == 1 && m > 1) {
    for (int i = 0; i < m; ++i) spec.set_base_radius(i, radii[0].get<double>());
    return;
  }
  expect_size(radii, m, "radii");
  for (int i = 0; i < m; ++i) spec.set_base_radius(i, radii[i].get<double>());
}

}  // namespace

GameSpec game_spec_from_json(std::string_view text) {
  const json j = parse(text, "game spec");
  const auto actions = field(j, "actions").get<std::vector<int>>();
  const int m = j.value("num_agents", static_cast<int>(actions.size()));
  if (m != static_cast<int>(actions.size())) throw std::invalid_argument("num_agents does not match actions");
  const int S = field(j, "num_states").get<int>();
  const int H = field(j, "horizon").get<int>();
  const Divergence div = parse_divergence(j.value("divergence", std::string("tv")));
  GameSpec spec(actions, S, H, div);
  const int J = spec.num_joint_actions();

  const auto& rewards = field(j, "rewards");
  expect_size(rewards, m, "rewards");
  for (int i = 0; i < m; ++i) {
    expect_size(rewards[i], H, "rewards[" + std::to_string(i) + "]");
    for (int h = 0; h < H; ++h) {
      expect_size(rewards[i][h], S, "rewards[i][h]");
      for (int s = 0; s < S; ++s) {
        expect_size(rewards[i][h][s], J, "rewards[i][h][s]");
        for (int a = 0; a < J; ++a) spec.set_reward(i, h, s, a, rewards[i][h][s][a].get<double>());
      }
    }
  }

  const auto& kernel = field(j, "kernel");
  expect_size(kernel, H, "kernel");
  for (int h = 0; h < H; ++h) {
    expect_size(kernel[h], S, "kernel[h]");
    for (int s = 0; s < S; ++s) {
      expect_size(kernel[h][s], J, "kernel[h][s]");
      for (int a = 0; a < J; ++a) {
        expect_size(kernel[h][s][a], S, "kernel[h][s][a]");
        spec.set_transition(h, s, a, kernel[h][s][a].get<std::vector<double>>());
      }
    }
  }

  if (j.contains("radii")) read_radii(j.at("radii"), spec);
  if (j.contains("fail_states")) spec.set_fail_states(j.at("fail_states").get<std::vector<int>>());
  if (j.contains("initial_state") && !j.at("initial_state").is_null()) {
    spec.set_initial_state(j.at("initial_state").get<int>());
  }
  spec.set_bernoulli_rewards(j.value("bernoulli", false));
  return spec;
}

std::string game_spec_to_json(const GameSpec& spec) {
  const int m = spec.num_agents();
  const int S = spec.num_states();
  const int H = spec.horizon();
  const int J = spec.num_joint_actions();
  json j;
  j["num_agents"] = m;
  j["num_states"] = S;
  j["actions"] = std::vector<int>(spec.actions_per_agent().begin(), spec.actions_per_agent().end());
  j["horizon"] = H;
  j["divergence"] = to_string(spec.divergence());

  std::vector<double> base(spec.base_radii().begin(), spec.base_radii().end());
  if (spec.radius_overrides().empty()) {
    j["radii"] = base;
  } else {
    json overrides = json::array();
    for (const auto& o : spec.radius_overrides()) {
      json e{{"h", o.h}, {"s", o.s}, {"sigma", o.sigma}};
      if (o.agent >= 0) e["agent"] = o.agent;
      if (o.joint_action >= 0) e["a"] = o.joint_action;
      overrides.push_back(std::move(e));
    }
    j["radii"] = {{"base", base}, {"overrides", overrides}};
  }

  json rewards = json::array();
  for (int i = 0; i < m; ++i) {
    json per_h = json::array();
    for (int h = 0; h < H; ++h) {
      json per_s = json::array();
      for (int s = 0; s < S; ++s) {
        std::vector<double> row(J);
        for (int a = 0; a < J; ++a) row[a] = spec.reward(i, h, s, a);
        per_s.push_back(row);
      }
      per_h.push_back(std::move(per_s));
    }
    rewards.push_back(std::move(per_h));
  }
  j["rewards"] = std::move(rewards);

  json kernel = json::array();
  for (int h = 0; h < H; ++h) {
    json per_s = json::array();
    for (int s = 0; s < S; ++s) {
      json per_a = json::array();
      for (int a = 0; a < J; ++a) {
        const auto row = spec.transition(h, s, a);
        per_a.push_back(std::vector<double>(row.begin(), row.end()));
      }
      per_s.push_back(std::move(per_a));
    }
    kernel.push_back(std::move(per_s));
  }
  j["kernel"] = std::move(kernel);
  j["fail_states"] = std::vector<int>(spec.fail_states().begin(), spec.fail_states().end());
  if (spec.initial_state()) j["initial_state"] = *spec.initial_state();
  if (spec.bernoulli_rewards()) j["bernoulli"] = true;
  return j.dump(1);
}

GameSpec load_game_spec(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return game_spec_from_json(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void save_game_spec(const GameSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, game_spec_to_json(spec) + "\n");
}

MatrixGame matrix_game_from_json(std::string_view text) {
  const json j = parse(text, "matrix game");
  JointActionSpace space(field(j, "actions").get<std::vector<int>>());
  auto payoffs = field(j, "payoffs").get<std::vector<std::vector<double>>>();
  return MatrixGame(std::move(space), std::move(payoffs));
}

MatrixGame load_matrix_game(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return matrix_game_from_json(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

SupportQuery StoredQuery::view() const {
  SupportQuery q;
  q.values = values;
  q.center = center;
  q.radius = radius;
  q.divergence = divergence;
  q.value_cap = value_cap;
  q.assume_zero_min = assume_zero_min;
  q.eta_floor = eta_floor;
  return q;
}

StoredQuery support_query_from_json(std::string_view text) {
  const json j = parse(text, "support query");
  StoredQuery q;
  q.values = field(j, "values").get<std::vector<double>>();
  q.center = field(j, "center").get<std::vector<double>>();
  if (q.values.size() != q.center.size()) throw std::invalid_argument("values and center differ in length");
  q.radius = field(j, "radius").get<double>();
  q.divergence = parse_divergence(j.value("divergence", std::string("tv")));
  double vmax = 1.0;
  for (double v : q.values) vmax = std::max(vmax, v);
  q.value_cap = j.value("value_cap", vmax);
  q.assume_zero_min = j.value("assume_zero_min", false);
  q.eta_floor = j.value("eta_floor", 0.0);
  return q;
}

StoredQuery load_support_query(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return support_query_from_json(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string solution_to_json(const GameSpec& spec, const RobustSolution& solution, EquilibriumKind kind) {
  const int S = spec.num_states();
  const int H = spec.horizon();
  const int J = spec.num_joint_actions();
  json j;
  j["kind"] = to_string(kind);
  j["divergence"] = to_string(spec.divergence());
  json policy = json::array();
  for (int h = 0; h < H; ++h) {
    json per_s = json::array();
    for (int s = 0; s < S; ++s) {
      const auto row = solution.policy.row(h, s);
      per_s.push_back(std::vector<double>(row.begin(), row.end()));
    }
    policy.push_back(std::move(per_s));
  }
  j["policy"] = std::move(policy);

  json agents = json::array();
  for (const auto& table : solution.values) {
    json v = json::array();
    for (int h = 0; h <= H; ++h) {
      const auto layer = table.layer(h);
      v.push_back(std::vector<double>(layer.begin(), layer.end()));
    }
    json q = json::array();
    for (int h = 0; h < H; ++h) {
      json per_s = json::array();
      for (int s = 0; s < S; ++s) {
        std::vector<double> row(J);
        for (int a = 0; a < J; ++a) row[a] = table.q(h, s, a);
        per_s.push_back(row);
      }
      q.push_back(std::move(per_s));
    }
    agents.push_back({{"v", std::move(v)}, {"q", std::move(q)}});
  }
  j["agents"] = std::move(agents);
  return j.dump(1);
}

}  // namespace drmg
