#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kpart::cli {

/// Runs the command line. Returns 0 when every run succeeded, 1 on run failures,
/// 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hash of `content` in git blob form: sha1("blob <size>\0" + content), hex encoded.
std::string git_blob_hash(const std::string& content);

} // namespace kpart::cli
