#pragma once

#include <map>
#include <string>
#include <string_view>

namespace de {

/// Replaces every `{{name}}` with its value. Unknown placeholders are left
/// untouched so literal braces in JSON schemas survive.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

}  // namespace de
