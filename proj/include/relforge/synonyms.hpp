#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "relforge/errors.hpp"

namespace relforge {

using SynonymTable = std::unordered_map<std::string, std::vector<std::string>>;

namespace detail {

// Bundled static synonym list, "head|syn|syn|...". Kept small and generic;
// augmentation quality is not a tuning target.
inline const char* const kBundledSynonyms[] = {
    "fix|repair|correct|resolve",
    "bug|defect|fault|flaw",
    "issue|problem|ticket",
    "error|fault|mistake",
    "crash|failure|abort",
    "fail|break|crash",
    "failure|fault|breakdown",
    "broken|damaged|faulty",
    "wrong|incorrect|bad",
    "invalid|illegal|bad",
    "valid|legal|correct",
    "missing|absent|lost",
    "fast|quick|rapid|speedy",
    "slow|sluggish|laggy",
    "quick|fast|swift",
    "improve|enhance|better",
    "enhance|improve|boost",
    "optimize|tune|streamline",
    "performance|speed|efficiency",
    "efficient|effective|economical",
    "secure|safe|protected",
    "security|safety|protection",
    "reliable|dependable|stable",
    "stable|steady|solid",
    "robust|sturdy|strong",
    "add|insert|append|include",
    "remove|delete|drop|eliminate",
    "delete|remove|erase",
    "update|refresh|revise",
    "upgrade|update|modernize",
    "change|modify|alter",
    "modify|change|adjust",
    "adjust|tune|calibrate",
    "create|make|build|generate",
    "make|create|produce",
    "build|construct|assemble",
    "generate|produce|create",
    "new|fresh|novel",
    "old|stale|legacy",
    "big|large|huge",
    "large|big|sizable",
    "small|little|tiny",
    "minor|small|trivial",
    "major|big|significant",
    "trivial|minor|simple",
    "important|significant|crucial",
    "critical|crucial|vital",
    "doc|document|manual",
    "docs|documentation|manuals",
    "documentation|docs|manual",
    "wiki|handbook|knowledgebase",
    "guide|manual|handbook",
    "manual|guide|handbook",
    "tutorial|guide|lesson",
    "example|sample|instance",
    "sample|example|specimen",
    "note|remark|comment",
    "comment|remark|annotation",
    "file|document|record",
    "folder|directory|dir",
    "method|function|routine",
    "function|method|procedure",
    "feature|capability|functionality",
    "support|handle|allow",
    "allow|permit|enable",
    "enable|activate|allow",
    "disable|deactivate|block",
    "prevent|avoid|block",
    "avoid|prevent|skip",
    "skip|omit|bypass",
    "ignore|disregard|skip",
    "block|prevent|bar",
    "start|begin|launch|initiate",
    "begin|start|commence",
    "stop|halt|end|terminate",
    "end|finish|conclude",
    "finish|complete|end",
    "complete|finish|full",
    "partial|incomplete|fractional",
    "empty|blank|void",
    "full|complete|entire",
    "open|launch|start",
    "close|shut|end",
    "install|setup|deploy",
    "deploy|release|ship",
    "release|version|launch",
    "version|release|revision",
    "merge|combine|join",
    "combine|merge|unite",
    "split|divide|separate",
    "join|connect|merge",
    "connect|link|attach",
    "link|connect|tie",
    "revert|undo|rollback",
    "restore|recover|revert",
    "recover|restore|retrieve",
    "retry|reattempt|repeat",
    "repeat|redo|duplicate",
    "duplicate|copy|clone",
    "copy|duplicate|replicate",
    "move|shift|relocate",
    "rename|relabel|retitle",
    "replace|substitute|swap",
    "swap|exchange|switch",
    "switch|toggle|change",
    "toggle|switch|flip",
    "show|display|present",
    "hide|conceal|mask",
    "display|show|render",
    "render|draw|paint",
    "load|fetch|read",
    "save|store|persist",
    "store|save|keep",
    "read|load|scan",
    "write|save|record",
    "parse|read|interpret",
    "handle|manage|process",
    "process|handle|execute",
    "run|execute|perform",
    "execute|run|perform",
    "return|yield|give",
    "value|amount|quantity",
    "list|array|sequence",
    "table|grid|chart",
    "button|control|widget",
    "window|frame|pane",
    "page|screen|view",
    "view|screen|display",
    "user|person|client",
    "client|user|customer",
    "server|host|backend",
    "request|query|call",
    "response|reply|answer",
    "message|notice|note",
    "warning|alert|caution",
    "log|record|journal",
    "debug|troubleshoot|diagnose",
    "test|check|verify",
    "check|verify|inspect",
    "verify|confirm|validate",
    "validate|verify|confirm",
    "confirm|verify|affirm",
    "ensure|guarantee|assure",
    "detect|find|discover",
    "find|locate|discover",
    "search|find|seek",
    "look|see|view",
    "watch|observe|monitor",
    "monitor|watch|track",
    "track|follow|trace",
    "trace|track|follow",
    "report|record|document",
    "record|log|register",
    "count|tally|number",
    "number|count|figure",
    "compute|calculate|evaluate",
    "calculate|compute|figure",
    "measure|gauge|assess",
    "assess|evaluate|judge",
    "evaluate|assess|appraise",
    "compare|contrast|match",
    "match|pair|fit",
    "fit|suit|match",
    "sort|order|arrange",
    "order|sequence|arrange",
    "arrange|organize|order",
    "organize|arrange|structure",
    "structure|organization|form",
    "format|layout|style",
    "style|format|design",
    "design|plan|layout",
    "plan|scheme|design",
    "schedule|timetable|plan",
    "wait|pause|delay",
    "delay|postpone|defer",
    "pause|halt|suspend",
    "suspend|pause|halt",
    "resume|continue|restart",
    "continue|proceed|resume",
    "proceed|continue|advance",
    "advance|progress|proceed",
    "reduce|decrease|lower",
    "decrease|reduce|lessen",
    "increase|raise|grow",
    "raise|increase|lift",
    "grow|expand|increase",
    "expand|grow|extend",
    "extend|expand|lengthen",
    "shorten|trim|abbreviate",
    "trim|cut|prune",
    "cut|trim|slice",
    "limit|restrict|cap",
    "restrict|limit|constrain",
    "wrap|enclose|cover",
    "cover|include|span",
    "include|contain|add",
    "contain|hold|include",
    "hold|keep|retain",
    "keep|retain|hold",
    "retain|keep|preserve",
    "preserve|maintain|keep",
    "maintain|keep|sustain",
    "document|record|describe",
    "describe|explain|detail",
    "explain|clarify|describe",
    "clarify|explain|simplify",
    "detail|specify|describe",
    "specify|define|state",
    "define|specify|describe",
    "state|declare|say",
    "declare|state|announce",
    "announce|declare|publish",
    "publish|release|post",
    "post|publish|send",
    "send|transmit|dispatch",
    "transmit|send|relay",
    "receive|get|accept",
    "get|fetch|obtain",
    "fetch|get|retrieve",
    "obtain|get|acquire",
    "provide|supply|give",
    "supply|provide|furnish",
    "give|provide|grant",
    "grant|give|allow",
    "deny|refuse|reject",
    "refuse|decline|deny",
    "reject|decline|refuse",
    "accept|take|approve",
    "approve|accept|endorse",
    "help|assist|aid",
    "use|employ|utilize",
    "need|require|want",
    "want|desire|wish",
    "simple|easy|plain",
    "complex|complicated|intricate",
    "easy|simple|effortless",
    "hard|difficult|tough",
    "difficult|hard|tricky",
    "correct|right|accurate",
    "clean|tidy|clear",
    "clear|clean|plain",
    "memory|storage|ram",
    "cache|buffer|store",
    "config|configuration|settings",
    "setting|option|preference",
    "option|choice|setting",
    "default|standard|baseline",
    "null|empty|nil",
    "timeout|expiry|deadline",
    "expire|lapse|end",
    "leak|drip|escape",
    "better|improved|superior",
    "worse|poorer|inferior",
    "question|query|inquiry",
    "answer|reply|response",
};

}  // namespace detail

inline const SynonymTable& bundled_synonyms() {
  static const SynonymTable table = [] {
    SynonymTable t;
    for (const char* line : detail::kBundledSynonyms) {
      std::string s(line);
      std::vector<std::string> parts;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '|') {
          parts.push_back(s.substr(start, i - start));
          start = i + 1;
        }
      }
      t[parts[0]] = std::vector<std::string>(parts.begin() + 1, parts.end());
    }
    return t;
  }();
  return table;
}

// Two-column UTF-8 file: "word synonym" per line; repeated words accumulate.
inline SynonymTable load_synonyms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open synonym table: " + path);
  SynonymTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string word, synonym;
    if (!(ss >> word >> synonym))
      throw data_error("synonym table line " + std::to_string(line_no) +
                       ": expected two columns");
    t[word].push_back(synonym);
  }
  return t;
}

}  // namespace relforge
