/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <unistd.h>

#include "xannot/anchoring.hpp"
#include "xannot/interchange.hpp"
#include "xannot/presentation.hpp"
#include "xannot/rsl.hpp"
#include "xannot/store.hpp"

namespace {

using namespace xannot;

std::vector<presentation::HighlightPosition> random_highlights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0, 1000);
  std::vector<presentation::HighlightPosition> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({EntityId(1, i + 1), static_cast<int>(rng() % 20), pos(rng), pos(rng)});
  }
  return out;
}

void BM_AssignColors(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto highlights = random_highlights(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(presentation::assign_colors(highlights));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AssignColors)->Range(8, 4096);

void BM_LayoutWidgets(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  presentation::MarginSpec m{200, 200, 1200, 0, 100'000, 4};
  std::vector<presentation::AnchorBox> anchors;
  std::vector<presentation::HighlightPosition> positions;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double y = static_cast<double>(rng() % 99'000);
    anchors.push_back({EntityId(1, i + 1), 0, 300, y, 100, 14});
    positions.push_back({EntityId(1, i + 1), 0, y, 300});
  }
  std::vector<presentation::WidgetRequest> widgets;
  for (std::uint64_t i = 0; i < n; ++i) {
    widgets.push_back({EntityId(2, i + 1), anchors[rng() % n].selector_id, 150, 20 + static_cast<double>(rng() % 40)});
  }
  const auto colors = presentation::assign_colors(positions);
  for (auto _ : state) benchmark::DoNotOptimize(presentation::layout_widgets(anchors, widgets, m, colors));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LayoutWidgets)->Range(8, 1024);

std::string random_page(std::size_t words, std::mt19937_64& rng) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    for (auto n = 3 + rng() % 6; n > 0; --n) out += static_cast<char>('a' + rng() % 26);
  }
  return out;
}

void BM_ResolveAnchorShifted(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto page = random_page(static_cast<std::size_t>(state.range(0)), rng);
  const std::size_t at = page.size() / 2;
  const std::size_t len = 24;
  TextSpan span{0, static_cast<std::int64_t>(at), static_cast<std::int64_t>(at + len), page.substr(at, len),
                page.substr(at - 32, 32), page.substr(at + len, 32)};
  const anchoring::PageTextSnapshot snapshot(0, "inserted words here " + page);
  for (auto _ : state) benchmark::DoNotOptimize(anchoring::resolve_text_anchor(span, snapshot));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(page.size()));
}
BENCHMARK(BM_ResolveAnchorShifted)->Range(64, 16384);

void populate(LinkService& core, std::size_t links, std::mt19937_64& rng) {
  const auto doc = core.create_resource(ResourceKind::pdf_document, "file:///doc.pdf").resource.id;
  std::vector<Endpoint> selectors;
  for (std::size_t i = 0; i < links; ++i) {
    const auto s = core.create_selector(doc, TextSpan{static_cast<int>(i % 30), 0, 10, "quote text", "", ""});
    selectors.push_back(Endpoint::selector(s.id));
    const auto target = core.create_resource(ResourceKind::comment, "note " + std::to_string(i)).resource.id;
    core.create_link({selectors[rng() % selectors.size()]}, {Endpoint::resource(target)});
  }
}

void BM_BacklinksFor(benchmark::State& state) {
  std::mt19937_64 rng(4);
  Store store;
  LinkService core(store);
  populate(core, static_cast<std::size_t>(state.range(0)), rng);
  std::vector<EntityId> ids;
  for (const auto& [id, r] : store.snapshot()->resources()) ids.push_back(id);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(core.backlinks_for(ids[i++ % ids.size()]));
}
BENCHMARK(BM_BacklinksFor)->Range(16, 4096);

void BM_FileStoreCommit(benchmark::State& state) {
  const auto path = std::filesystem::temp_directory_path() / ("xannot-bench-" + std::to_string(::getpid()));
  {
    Store store(StoreOptions{path, 256, {}});
    LinkService core(store);
    const auto doc = core.create_resource(ResourceKind::pdf_document, "file:///doc.pdf").resource.id;
    std::int64_t i = 0;
    for (auto _ : state) {
      core.create_selector(doc, TextSpan{0, i, i + 5, "quote", "", ""});
      ++i;
    }
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".lock");
}
BENCHMARK(BM_FileStoreCommit);

void BM_ExportSerialize(benchmark::State& state) {
  std::mt19937_64 rng(5);
  Store store;
  LinkService core(store);
  populate(core, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(interchange::serialize(interchange::encode(core.export_bundle())));
  }
}
BENCHMARK(BM_ExportSerialize)->Range(16, 4096);

}  // namespace

BENCHMARK_MAIN();
