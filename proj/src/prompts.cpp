#include "debate_forum/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "debate_forum/errors.hpp"

namespace debate_forum {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_placeholder_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Calls fn(name, begin, end) for every {name} token.
template <typename Fn>
void scan_placeholders(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    std::size_t end = pos + 1;
    while (end < text.size() && is_placeholder_char(text[end])) {
      ++end;
    }
    if (end < text.size() && text[end] == '}' && end > pos + 1) {
      fn(text.substr(pos + 1, end - pos - 1), pos, end + 1);
      pos = end + 1;
    } else {
      ++pos;
    }
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const std::vector<std::pair<Role, RoundKind>>& required_templates() {
  static const std::vector<std::pair<Role, RoundKind>> required = {
      {Role::Saboteur, RoundKind::System},     {Role::Saboteur, RoundKind::Opening},
      {Role::Saboteur, RoundKind::Rebuttal},   {Role::FactBased, RoundKind::System},
      {Role::FactBased, RoundKind::Opening},   {Role::FactBased, RoundKind::Rebuttal},
      {Role::FactBased, RoundKind::Baseline},  {Role::FactBased, RoundKind::VerdictRetry},
      {Role::Moderator, RoundKind::System},    {Role::Moderator, RoundKind::Opening},
      {Role::Moderator, RoundKind::Rebuttal},  {Role::Moderator, RoundKind::Verdict},
      {Role::Moderator, RoundKind::VerdictRetry},
  };
  return required;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  scan_placeholders(text, [&](std::string_view name, std::size_t, std::size_t) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      names.emplace_back(name);
    }
  });
  return names;
}

std::string render_prompt(std::string_view text, const PromptContext& context) {
  std::string out;
  out.reserve(text.size());
  std::size_t copied = 0;
  scan_placeholders(text, [&](std::string_view name, std::size_t begin, std::size_t end) {
    auto it = context.find(name);
    if (it == context.end()) {
      throw RenderError(std::string(name), "unresolved placeholder {" + std::string(name) + "}");
    }
    out.append(text.substr(copied, begin - copied));
    out.append(it->second);
    copied = end;
  });
  out.append(text.substr(copied));
  return out;
}

std::string render_prompt(const PromptTemplate& tmpl, const PromptContext& context) {
  return render_prompt(tmpl.text, context);
}

char option_letter(std::size_t index) {
  if (index >= 26) {
    throw std::out_of_range("option index beyond Z");
  }
  return static_cast<char>('A' + index);
}

std::string render_options(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) {
      out.push_back('\n');
    }
    out.push_back(option_letter(i));
    out.append(") ");
    out.append(options[i]);
  }
  return out;
}

std::string render_transcript(const std::vector<Persona>& personas, const std::vector<Turn>& turns) {
  if (turns.empty()) {
    return "(no messages yet)";
  }
  std::string out;
  for (const auto& turn : turns) {
    std::string name = "Debater-" + std::to_string(turn.persona_id);
    for (const auto& p : personas) {
      if (p.id == turn.persona_id) {
        name = p.display_name;
      }
    }
    if (!out.empty()) {
      out.append("\n\n");
    }
    out.append("[Round " + std::to_string(turn.round + 1) + "] " + name + ":\n");
    out.append(turn.message);
  }
  return out;
}

std::optional<std::size_t> try_parse_choice(std::string_view reply, std::size_t option_count) {
  if (option_count < 2 || option_count > 26) {
    throw std::invalid_argument("option_count must be in 2..26");
  }
  std::optional<std::size_t> marked;
  for (std::size_t pos = 0; pos + 6 <= reply.size(); ++pos) {
    if (pos > 0 && is_alnum(reply[pos - 1])) {
      continue;
    }
    bool match = true;
    for (std::size_t k = 0; k < 6; ++k) {
      if (std::tolower(static_cast<unsigned char>(reply[pos + k])) != "answer"[k]) {
        match = false;
        break;
      }
    }
    if (!match) {
      continue;
    }
    std::size_t i = pos + 6;
    while (i < reply.size() && (reply[i] == ' ' || reply[i] == '\t' || reply[i] == '*')) ++i;
    if (i >= reply.size() || reply[i] != ':') {
      continue;
    }
    ++i;
    while (i < reply.size() && (reply[i] == ' ' || reply[i] == '\t' || reply[i] == '*' || reply[i] == '(')) ++i;
    if (i >= reply.size() || !std::isalpha(static_cast<unsigned char>(reply[i]))) {
      continue;
    }
    if (i + 1 < reply.size() && is_alnum(reply[i + 1])) {
      continue;
    }
    const auto index = static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(reply[i])) - 'A');
    if (index < option_count) {
      marked = index;
    }
  }
  if (marked) {
    return marked;
  }
  std::optional<std::size_t> standalone;
  for (std::size_t i = 0; i < reply.size(); ++i) {
    const char c = reply[i];
    if (c < 'A' || c > 'Z') {
      continue;
    }
    if (i > 0 && is_alnum(reply[i - 1])) {
      continue;
    }
    if (i + 1 < reply.size() && is_alnum(reply[i + 1])) {
      continue;
    }
    const auto index = static_cast<std::size_t>(c - 'A');
    if (index < option_count) {
      standalone = index;
    }
  }
  return standalone;
}

std::size_t parse_choice(std::string_view reply, std::size_t option_count) {
  if (auto choice = try_parse_choice(reply, option_count)) {
    return *choice;
  }
  throw ParseError(ParseError::Kind::NoChoice);
}

std::string format_choice(std::size_t index) {
  return std::string("ANSWER: ") + option_letter(index);
}

TemplateSet TemplateSet::parse(std::string_view document) {
  TemplateSet set;
  std::istringstream in{std::string(document)};
  std::string line;
  std::string section;
  std::string body;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (section.empty()) {
      return;
    }
    if (section == "meta") {
      std::istringstream meta(body);
      std::string kv;
      while (std::getline(meta, kv)) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos && trim(kv.substr(0, eq)) == "version") {
          set.version_ = std::stoi(trim(kv.substr(eq + 1)));
        }
      }
    } else {
      const auto dot = section.find('.');
      if (dot == std::string::npos) {
        throw ConfigError("template section [" + section + "] is not of the form [role.kind]");
      }
      PromptTemplate t;
      t.role = role_from_string(section.substr(0, dot));
      t.kind = round_kind_from_string(section.substr(dot + 1));
      while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) {
        body.pop_back();
      }
      t.text = body;
      if (!set.templates_.emplace(std::pair{t.role, t.kind}, t).second) {
        throw ConfigError("duplicate template section [" + section + "]");
      }
    }
    body.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.rfind("#", 0) == 0) {
      continue;
    }
    if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
      flush();
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    if (section.empty()) {
      if (!trim(line).empty()) {
        throw ConfigError("template text outside any section at line " + std::to_string(line_no));
      }
      continue;
    }
    if (body.empty() && trim(line).empty()) {
      continue;  // leading blank lines
    }
    body.append(line);
    body.push_back('\n');
  }
  flush();

  if (set.version_ <= 0) {
    throw ConfigError("template file lacks [meta] version");
  }
  for (const auto& [role, kind] : required_templates()) {
    if (!set.contains(role, kind)) {
      throw ConfigError("template file lacks section [" + std::string(to_string(role)) + "." +
                        std::string(to_string(kind)) + "]");
    }
  }
  return set;
}

TemplateSet TemplateSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open template file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string TemplateSet::default_path() { return DEBATE_FORUM_DEFAULT_TEMPLATES; }

bool TemplateSet::contains(Role role, RoundKind kind) const {
  return templates_.count({role, kind}) > 0;
}

const PromptTemplate& TemplateSet::get(Role role, RoundKind kind) const {
  auto it = templates_.find({role, kind});
  if (it == templates_.end()) {
    throw ConfigError("no template for [" + std::string(to_string(role)) + "." +
                      std::string(to_string(kind)) + "]");
  }
  return it->second;
}

std::vector<PromptTemplate> TemplateSet::all() const {
  std::vector<PromptTemplate> out;
  for (const auto& [_, t] : templates_) {
    out.push_back(t);
  }
  return out;
}

}  // namespace debate_forum
