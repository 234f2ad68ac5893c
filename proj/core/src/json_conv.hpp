// Internal bridge between the public segment/argument types and their JSON
// encodings. Shared by the dataset module and the scenario loader; defined in
// dataset.cpp so the vendored JSON header stays out of the public interface.
#pragma once

#include "json.hpp"
#include "vistok/chatml.hpp"

namespace vistok::detail {

using ojson = nlohmann::ordered_json;

segment segment_from_json(const ojson& j);
ojson segment_to_json(const segment& s);

arg_map args_from_json(const ojson& j);
ojson args_to_json(const arg_map& args);

}  // namespace vistok::detail
