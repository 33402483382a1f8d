#include "fixtures.hpp"

#include "earmark/crypto.hpp"

#include <fstream>
#include <iterator>
#include <random>

namespace earmark::testing {

namespace {

void put_le16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

void put_le32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_le64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_be32(std::string& s, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string wav_with_data(std::uint32_t sample_rate, std::uint16_t channels,
                          std::string data) {
  std::string out = "RIFF";
  put_le32(out, static_cast<std::uint32_t>(36 + data.size()));
  out += "WAVEfmt ";
  put_le32(out, 16);
  put_le16(out, 1);
  put_le16(out, channels);
  put_le32(out, sample_rate);
  put_le32(out, sample_rate * channels * 2);
  put_le16(out, static_cast<std::uint16_t>(channels * 2));
  put_le16(out, 16);
  out += "data";
  put_le32(out, static_cast<std::uint32_t>(data.size()));
  return out + data;
}

std::string noise(std::size_t n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::string s(n, '\0');
  for (auto& c : s) c = static_cast<char>(rng() & 0xFF);
  return s;
}

}  // namespace

std::string make_wav(std::uint32_t sample_rate, std::uint16_t channels,
                     std::uint32_t frames, std::uint32_t seed) {
  return wav_with_data(sample_rate, channels,
                       noise(std::size_t{frames} * channels * 2, seed));
}

std::string make_wav_of_size(std::size_t total_bytes) {
  return wav_with_data(8000, 1, noise(total_bytes - 44, 7));
}

std::string make_wav_ms(std::int64_t ms) {
  return make_wav(8000, 1, static_cast<std::uint32_t>(ms * 8), 3);
}

std::string make_mp3(const Mp3Options& o) {
  std::string out;
  if (o.id3_payload > 0) {
    out += "ID3";
    out.push_back(4);
    out.push_back(0);
    out.push_back(0);  // flags
    const auto n = static_cast<std::uint32_t>(o.id3_payload);
    for (int shift : {21, 14, 7, 0}) out.push_back(static_cast<char>((n >> shift) & 0x7F));
    out += std::string(o.id3_payload, '\0');
  }
  if (o.padding_between) out += std::string(13, '\0');

  constexpr std::size_t kFrameLength = 144 * 128000 / 44100;  // 417
  for (std::size_t i = 0; i < o.frames; ++i) {
    std::string frame;
    frame.push_back(static_cast<char>(0xFF));
    frame.push_back(static_cast<char>(0xFB));  // MPEG-1, Layer III, no CRC
    frame.push_back(static_cast<char>(0x90));  // 128 kbit/s, 44.1 kHz, no padding
    frame.push_back(static_cast<char>(0x00));  // stereo
    if (i == 0 && o.xing_frames) {
      frame += std::string(32, '\0');  // side information
      frame += "Info";
      put_be32(frame, 0x1);
      put_be32(frame, *o.xing_frames);
    }
    frame.resize(kFrameLength, '\x55');
    out += frame;
  }
  return out;
}

std::uint32_t bitwise_ogg_crc(std::string_view page) {
  std::uint32_t crc = 0;
  for (std::size_t i = 0; i < page.size(); ++i) {
    const std::uint32_t byte = (i >= 22 && i < 26) ? 0 : static_cast<std::uint8_t>(page[i]);
    crc ^= byte << 24;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x80000000u) ? (crc << 1) ^ 0x04C11DB7u : crc << 1;
    }
  }
  return crc;
}

std::string ogg_page(std::uint8_t header_type, std::uint64_t granule,
                     std::uint32_t serial, std::uint32_t sequence,
                     std::string_view packet) {
  std::string page = "OggS";
  page.push_back(0);
  page.push_back(static_cast<char>(header_type));
  put_le64(page, granule);
  put_le32(page, serial);
  put_le32(page, sequence);
  put_le32(page, 0);  // checksum placeholder
  std::vector<std::uint8_t> lacing;
  std::size_t left = packet.size();
  while (left >= 255) {
    lacing.push_back(255);
    left -= 255;
  }
  lacing.push_back(static_cast<std::uint8_t>(left));
  page.push_back(static_cast<char>(lacing.size()));
  for (auto l : lacing) page.push_back(static_cast<char>(l));
  page += packet;
  const std::uint32_t crc = bitwise_ogg_crc(page);
  for (int i = 0; i < 4; ++i) page[22 + i] = static_cast<char>((crc >> (8 * i)) & 0xFF);
  return page;
}

std::string make_ogg_opus(std::uint16_t pre_skip, std::uint64_t final_granule) {
  std::string head = "OpusHead";
  head.push_back(1);  // version
  head.push_back(2);  // channels
  put_le16(head, pre_skip);
  put_le32(head, 48000);
  put_le16(head, 0);
  head.push_back(0);
  std::string tags = "OpusTags";
  put_le32(tags, 0);
  put_le32(tags, 0);
  return ogg_page(0x02, 0, 0x1234, 0, head) + ogg_page(0x00, 0, 0x1234, 1, tags) +
         ogg_page(0x00, final_granule / 2, 0x1234, 2, std::string(300, 'a')) +
         ogg_page(0x04, final_granule, 0x1234, 3, std::string(100, 'b'));
}

std::string make_ogg_vorbis(std::uint32_t rate, std::uint64_t final_granule) {
  std::string id = "\x01vorbis";
  put_le32(id, 0);
  id.push_back(1);
  put_le32(id, rate);
  put_le32(id, 0);
  put_le32(id, 128000);
  put_le32(id, 0);
  id.push_back(static_cast<char>(0xB8));
  id.push_back(1);
  return ogg_page(0x02, 0, 77, 0, id) +
         ogg_page(0x04, final_granule, 77, 1, std::string(40, 'v'));
}

TempDir::TempDir() {
  path = std::filesystem::temp_directory_path() / ("earmark-test-" + crypto::random_hex(8));
  std::filesystem::create_directories(path);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path, ec);
}

TestEnv::TestEnv(std::chrono::milliseconds token_ttl) : blob_dir_(dir_.path / "blobs") {
  Config config;
  config.db_path = ":memory:";
  config.blob_dir = blob_dir_;
  config.auth.token_ttl = token_ttl;
  config.auth.signing_secret = "test-signing-secret";
  config.auth.password = crypto::PasswordParams::minimal();
  config.admin_username = kAdminName;
  config.admin_password = kAdminPassword;
  auto clock = std::make_unique<ManualClock>();
  clock_ = clock.get();
  app_ = std::make_unique<App>(std::move(config), std::move(clock));
}

Principal TestEnv::admin() {
  auto user = app_->store.transact([](Tx& tx) { return tx.find_user_by_name(kAdminName); });
  return Principal{user->id, user->username, user->role};
}

Principal TestEnv::add_user(const std::string& username, Role role) {
  User u = app_->admin.create_user(admin(), username, password_for(username), role);
  return Principal{u.id, u.username, u.role};
}

Project TestEnv::add_project(const std::string& name) {
  return app_->admin.create_project(admin(), name);
}

void TestEnv::join(const Principal& user, const Project& project) {
  app_->admin.assign_user_to_project(admin(), user.user_id, project.id);
}

IngestResult TestEnv::ingest(const Project& project, std::vector<std::string> assignees,
                             std::vector<PreAnnotation> pre, std::string audio,
                             std::string filename) {
  IngestRequest req;
  req.api_key = project.api_key;
  req.original_filename = std::move(filename);
  req.audio = std::move(audio);
  req.pre_annotations = std::move(pre);
  req.assignees = std::move(assignees);
  return app_->ingestion.ingest(req);
}

Project build_export_fixture(TestEnv& env) {
  auto& app = env.app();
  auto& admin = app.admin;
  const Principal root = env.admin();
  Project project = env.add_project("Field Recordings");

  // Insertion order differs from the sorted export order on purpose.
  Label speaker = admin.create_label(root, project.id, "speaker", SelectionType::kSingle);
  LabelValue male = admin.create_label_value(root, speaker.id, "male");
  LabelValue female = admin.create_label_value(root, speaker.id, "female");
  Label noise = admin.create_label(root, project.id, "noise", SelectionType::kMulti);
  LabelValue wind = admin.create_label_value(root, noise.id, "wind");
  LabelValue traffic = admin.create_label_value(root, noise.id, "traffic");
  admin.create_label_value(root, noise.id, "music");

  Principal bob = env.add_user("bob");
  Principal alice = env.add_user("alice");
  env.join(bob, project);
  env.join(alice, project);

  const std::string stored = "5d41402abc4b2a76b9719d911017c592.wav";
  app.blobs.put(stored, make_wav_ms(60000));
  const DataPointId dp = app.store.transact([&](Tx& tx) {
    DataPoint d;
    d.project_id = project.id;
    d.original_filename = "interview_01.wav";
    d.stored_name = stored;
    d.format = AudioFormat::kWav;
    d.duration_ms = 60000;
    d.reference_transcription = "hello world";
    d.created_at = env.clock().now();
    DataPointId id = tx.insert_datapoint(d);
    tx.insert_assignment(id, bob.user_id, Status::kPending, false, d.created_at);
    tx.insert_assignment(id, alice.user_id, Status::kPending, false, d.created_at);
    return id;
  });

  auto& annotation = app.annotation;
  annotation.create_segment(bob, dp,
                            SegmentDraft{200, 1400, "hello word", {{speaker.id, {male.id}}}});
  annotation.create_segment(
      alice, dp,
      SegmentDraft{0, 1500, "hello world",
                   {{speaker.id, {female.id}}, {noise.id, {wind.id, traffic.id}}}});
  annotation.set_review_flag(bob, dp, true);
  annotation.set_completion(alice, dp, Status::kCompleted);
  return project;
}

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(EARMARK_GOLDEN_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing golden file " + name);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace earmark::testing
