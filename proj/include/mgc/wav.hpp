#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgc/audio.hpp"

namespace mgc {

/// Decodes a RIFF/WAVE byte stream. Accepts PCM 16/24-bit integer and 32-bit
/// IEEE float, 1 or 2 channels. Stereo is downmixed by channel mean; integer
/// samples are scaled to [-1, 1] by 1 / 2^(bits-1). Throws format_error on a
/// malformed container or an unsupported codec.
AudioClip decode_wav(const std::vector<std::uint8_t>& bytes);

/// Encodes a mono clip as PCM-16 WAV. Samples are clamped to [-1, 1] and
/// rounded to the nearest 16-bit code.
std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip);

AudioClip read_wav_file(const std::string& path);
void write_wav_file(const std::string& path, const AudioClip& clip);

} // namespace mgc
