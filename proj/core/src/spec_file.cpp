#include "sketchnet/spec_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sketchnet {

NetworkSpec load_spec_file(const std::filesystem::path& path, std::size_t in_channels)
{
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path.string() + ": cannot open architecture file");
    NetworkSpec spec{in_channels, {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        long long kernel = 0;
        long long width = 0;
        std::string activation;
        if (!(fields >> kernel)) {
            if (fields.eof() && std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
                continue;
            }
            throw CorruptDataError(path.string() + ":" + std::to_string(line_no) + ": expected a kernel size");
        }
        std::string extra;
        if (!(fields >> width >> activation) || (fields >> extra) || kernel <= 0 || width <= 0) {
            throw CorruptDataError(path.string() + ":" + std::to_string(line_no) +
                                   ": expected 'kernel out_channels activation'");
        }
        spec.layers.push_back({static_cast<std::size_t>(kernel), static_cast<std::size_t>(width),
                               parse_activation(activation)});
    }
    spec.validate();
    return spec;
}

NetworkSpec resolve_architecture(const std::string& name_or_path, std::size_t in_channels)
{
    const auto& names = builtin_spec_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
        return builtin_spec(name_or_path, in_channels);
    }
    std::error_code ec;
    if (std::filesystem::is_regular_file(name_or_path, ec)) return load_spec_file(name_or_path, in_channels);
    return builtin_spec(name_or_path, in_channels);
}

}  // namespace sketchnet
