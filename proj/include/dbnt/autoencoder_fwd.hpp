#pragma once

namespace dbnt {
struct AutoencoderModel;
} // namespace dbnt
