#include <string>

#include "doctest.h"
#include "test_util.hpp"

using testutil::TempDir;
using testutil::cli_path;
using testutil::read_file;
using testutil::run_cmd;
using testutil::shq;
using testutil::write_file;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// Writes the embedded sample dataset to <dir>/fixture.csv and returns the path.
std::string make_fixture(const TempDir& tmp) {
    const auto path = tmp.file("fixture.csv");
    const auto r = run_cmd(cli_path() + " fixture --out " + shq(path));
    REQUIRE(r.exit_code == 0);
    return path;
}

// Tiny one-attribute training set for monitor tests.
std::string make_threshold_csv(const TempDir& tmp, const std::string& name) {
    const auto path = tmp.file(name);
    write_file(path, "label,v\nlow,0\nlow,10\nhigh,90\nhigh,100\n");
    return path;
}

}  // namespace

TEST_CASE("cli: usage errors exit 1, help exits 0") {
    CHECK(run_cmd(cli_path()).exit_code == 1);

    const auto help = run_cmd(cli_path() + " --help");
    CHECK(help.exit_code == 0);
    for (const char* sub :
         {"simulate", "features", "fixture", "train", "predict", "evaluate", "monitor"}) {
        CHECK(contains(help.output, sub));
    }

    CHECK(run_cmd(cli_path() + " frobnicate").exit_code == 1);
    CHECK(run_cmd(cli_path() + " simulate --width abc --out /tmp/x.pgm").exit_code == 1);
    CHECK(run_cmd(cli_path() + " train --help").exit_code == 0);
}

TEST_CASE("cli: simulate is byte-deterministic and reports the field contrast") {
    TempDir tmp;
    const auto a = tmp.file("a.pgm");
    const auto b = tmp.file("b.pgm");
    const std::string args = " simulate --width 64 --height 48 --phasors 60 --seed 11 --out ";

    const auto r1 = run_cmd(cli_path() + args + shq(a));
    REQUIRE(r1.exit_code == 0);
    CHECK(contains(r1.output, "field contrast"));
    const auto r2 = run_cmd(cli_path() + args + shq(b));
    REQUIRE(r2.exit_code == 0);

    const auto bytes_a = read_file(a);
    CHECK(bytes_a == read_file(b));
    CHECK(bytes_a.substr(0, 13) == "P5\n64 48\n255\n");
    CHECK(bytes_a.size() == 13 + 64 * 48);

    // Different seed, different payload.
    const auto c = tmp.file("c.pgm");
    run_cmd(cli_path() + " simulate --width 64 --height 48 --phasors 60 --seed 12 --out " +
            shq(c));
    CHECK(read_file(c) != bytes_a);
}

TEST_CASE("cli: fixture emits the 20-row embedded dataset verbatim") {
    TempDir tmp;
    const auto path = make_fixture(tmp);
    const auto text = read_file(path);

    CHECK(contains(text,
                   "label,Russ_3x3,Levine_3x3,Sigma_3x3,Skewness_3x3,"
                   "Russ_5x5,Levine_5x5,Sigma_5x5,Skewness_5x5,StdDev_3x3"));
    // First row of each class, as published.
    CHECK(contains(text, "normal,378,6002,77.47,0.5,883,7621,87.3,0.47,69.95"));
    CHECK(contains(text, "micro-collapse,"));

    size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 21);  // header + 20 rows

    const auto again = tmp.file("fixture2.csv");
    run_cmd(cli_path() + " fixture --out " + shq(again));
    CHECK(read_file(again) == text);
}

TEST_CASE("cli: features extracts labelled per-roi attributes") {
    TempDir tmp;
    const auto img = tmp.file("img.pgm");
    REQUIRE(run_cmd(cli_path() + " simulate --width 64 --height 64 --seed 3 --out " + shq(img))
                .exit_code == 0);

    const auto csv = tmp.file("f.csv");
    const auto r = run_cmd(cli_path() + " features --image " + shq(img) +
                           " --roi 0,0,16,16:A --roi 32,32,16,16:B --label normal --out " +
                           shq(csv));
    REQUIRE(r.exit_code == 0);

    const auto text = read_file(csv);
    CHECK(contains(text, "label,Russ_3x3_A"));
    CHECK(contains(text, "StdDev_3x3_B"));
    CHECK(contains(text, "\nnormal,"));
    size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 2);

    SUBCASE("malformed roi is a usage error (exit 1)") {
        const auto bad = run_cmd(cli_path() + " features --image " + shq(img) +
                                 " --roi nope --out " + shq(tmp.file("x.csv")));
        CHECK(bad.exit_code == 1);
        CHECK(contains(bad.output, "usage error"));
    }
    SUBCASE("roi outside the image is a data error (exit 2)") {
        const auto bad = run_cmd(cli_path() + " features --image " + shq(img) +
                                 " --roi 60,60,16,16 --out " + shq(tmp.file("x.csv")));
        CHECK(bad.exit_code == 2);
        CHECK(contains(bad.output, "does not fit"));
    }
    SUBCASE("missing image file fails option validation (exit 1)") {
        const auto bad = run_cmd(cli_path() + " features --image " +
                                 shq(tmp.file("absent.pgm")) + " --roi 0,0,16,16 --out " +
                                 shq(tmp.file("x.csv")));
        CHECK(bad.exit_code == 1);
    }
    SUBCASE("corrupt image content is a data error (exit 2)") {
        const auto junk = tmp.file("junk.pgm");
        write_file(junk, "P6 not really a pgm");
        const auto bad = run_cmd(cli_path() + " features --image " + shq(junk) +
                                 " --roi 0,0,8,8 --out " + shq(tmp.file("x.csv")));
        CHECK(bad.exit_code == 2);
    }
}

TEST_CASE("cli: train writes a versioned model document") {
    TempDir tmp;
    const auto fixture = make_fixture(tmp);

    const auto knn = tmp.file("knn.model");
    const auto r1 = run_cmd(cli_path() + " train --algo knn --in " + shq(fixture) + " --out " +
                            shq(knn));
    REQUIRE(r1.exit_code == 0);
    CHECK(contains(r1.output, "trained"));
    CHECK(contains(read_file(knn), "\"format\": \"lsikit-model\""));
    CHECK(contains(read_file(knn), "\"type\": \"knn\""));

    const auto nb = tmp.file("nb.model");
    REQUIRE(run_cmd(cli_path() + " train --algo nb --in " + shq(fixture) + " --out " + shq(nb))
                .exit_code == 0);
    CHECK(contains(read_file(nb), "\"type\": \"nb\""));

    const auto ens = tmp.file("ens.model");
    REQUIRE(run_cmd(cli_path() + " train --algo ensemble --in " + shq(fixture) + " --out " +
                    shq(ens))
                .exit_code == 0);
    CHECK(contains(read_file(ens), "\"type\": \"ensemble\""));

    SUBCASE("invalid algorithm and missing required flags exit 1") {
        CHECK(run_cmd(cli_path() + " train --algo forest --in " + shq(fixture) + " --out " +
                      shq(tmp.file("x.model")))
                  .exit_code == 1);
        CHECK(run_cmd(cli_path() + " train --in " + shq(fixture) + " --out " +
                      shq(tmp.file("x.model")))
                  .exit_code == 1);
    }
    SUBCASE("corrupt csv is a data error with a line number") {
        const auto bad_csv = tmp.file("bad.csv");
        write_file(bad_csv, "label,a\nx,1\ny,oops\n");
        const auto r = run_cmd(cli_path() + " train --algo knn --in " + shq(bad_csv) +
                               " --out " + shq(tmp.file("x.model")));
        CHECK(r.exit_code == 2);
        CHECK(contains(r.output, "line 3"));
    }
}

TEST_CASE("cli: predict emits row,predicted,confidence and checks schemas") {
    TempDir tmp;
    const auto fixture = make_fixture(tmp);
    const auto model = tmp.file("knn.model");
    REQUIRE(run_cmd(cli_path() + " train --algo knn --in " + shq(fixture) + " --out " +
                    shq(model))
                .exit_code == 0);

    const auto r = run_cmd(cli_path() + " predict --model " + shq(model) + " --in " +
                           shq(fixture));
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "row,predicted,confidence"));
    // 1-NN on its own training rows is perfect: row 0 normal, row 19 collapse.
    CHECK(contains(r.output, "0,normal,1"));
    CHECK(contains(r.output, "19,micro-collapse,1"));

    // --out also writes the same CSV to disk.
    const auto out_csv = tmp.file("preds.csv");
    const auto r2 = run_cmd(cli_path() + " predict --model " + shq(model) + " --in " +
                            shq(fixture) + " --out " + shq(out_csv));
    REQUIRE(r2.exit_code == 0);
    CHECK(contains(read_file(out_csv), "row,predicted,confidence\n0,normal,1\n"));

    SUBCASE("schema mismatch is a data error naming the first difference") {
        const auto other = tmp.file("other.csv");
        write_file(other, "label,x,y\nnormal,1,2\nmicro-collapse,3,4\n");
        const auto bad = run_cmd(cli_path() + " predict --model " + shq(model) + " --in " +
                                 shq(other));
        CHECK(bad.exit_code == 2);
        CHECK(contains(bad.output, "does not match the model"));
    }
}

TEST_CASE("cli: evaluate leave-one-out reports the frozen 18/20 accuracy") {
    TempDir tmp;
    const auto fixture = make_fixture(tmp);
    const auto r = run_cmd(cli_path() + " evaluate --loo --algo knn --in " + shq(fixture));
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "leave-one-out over 20 rows (knn)"));
    CHECK(contains(r.output, "accuracy     90.0% (18/20)"));
    CHECK(contains(r.output, "sensitivity  100.0% (positive: micro-collapse)"));
    CHECK(contains(r.output, "specificity  80.0%"));
    CHECK(contains(r.output, "confusion matrix"));

    // Determinism of the full report.
    const auto again = run_cmd(cli_path() + " evaluate --loo --algo knn --in " + shq(fixture));
    CHECK(again.output == r.output);
}

TEST_CASE("cli: evaluate modes are mutually exclusive and holdout is validated") {
    TempDir tmp;
    const auto fixture = make_fixture(tmp);

    const auto holdout = run_cmd(cli_path() + " evaluate --algo knn --in " + shq(fixture));
    REQUIRE(holdout.exit_code == 0);
    CHECK(contains(holdout.output, "holdout 0.5 (seed 0): 10 train / 10 test rows (knn)"));
    CHECK(contains(holdout.output, "accuracy"));

    const auto model = tmp.file("m.model");
    REQUIRE(run_cmd(cli_path() + " train --algo knn --in " + shq(fixture) + " --out " +
                    shq(model))
                .exit_code == 0);
    const auto on_model =
        run_cmd(cli_path() + " evaluate --model " + shq(model) + " --in " + shq(fixture));
    REQUIRE(on_model.exit_code == 0);
    CHECK(contains(on_model.output, "evaluating saved model on 20 rows"));
    CHECK(contains(on_model.output, "accuracy     100.0% (20/20)"));

    // Conflicting flag combinations are parse-level usage errors.
    CHECK(run_cmd(cli_path() + " evaluate --model " + shq(model) + " --algo knn --in " +
                  shq(fixture))
              .exit_code == 1);
    CHECK(run_cmd(cli_path() + " evaluate --loo --holdout 0.3 --algo knn --in " + shq(fixture))
              .exit_code == 1);
    CHECK(run_cmd(cli_path() + " evaluate --holdout 1.5 --algo knn --in " + shq(fixture))
              .exit_code == 1);
}

TEST_CASE("cli: monitor consumes csv streams and writes an events csv") {
    TempDir tmp;
    const auto train_csv = make_threshold_csv(tmp, "train.csv");
    const auto model = tmp.file("m.model");
    REQUIRE(run_cmd(cli_path() + " train --algo knn --k 1 --in " + shq(train_csv) + " --out " +
                    shq(model))
                .exit_code == 0);

    const auto frames = tmp.file("frames.csv");
    write_file(frames,
               "label,v\n?,0\n?,5\n?,2\n?,95\n?,99\n?,100\n");

    const auto events = tmp.file("events.csv");
    const auto r = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                           shq(frames) + " --events-out " + shq(events));
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "processed 6 frames (debounce 3)"));
    CHECK(contains(r.output, "event: frame 3 at t=216s: low -> high (confidence 1)"));
    CHECK(read_file(events) == "frame,timestamp,from,to,confidence\n3,216,low,high,1\n");

    SUBCASE("verbose prints one line per frame") {
        const auto v = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                               shq(frames) + " --verbose");
        REQUIRE(v.exit_code == 0);
        CHECK(contains(v.output, "frame 0 t=0s label=low"));
        CHECK(contains(v.output, "frame 5 t=360s label=high"));
    }
    SUBCASE("a steady stream reports no events and still exits 0") {
        const auto steady = tmp.file("steady.csv");
        write_file(steady, "label,v\n?,1\n?,2\n?,0\n?,3\n");
        const auto s = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                               shq(steady));
        CHECK(s.exit_code == 0);
        CHECK(contains(s.output, "no state changes detected"));
    }
    SUBCASE("debounce must be positive") {
        CHECK(run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                      shq(frames) + " --debounce 0")
                  .exit_code == 1);
    }
    SUBCASE("trend needs both attribute and threshold") {
        CHECK(run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                      shq(frames) + " --trend-attribute v")
                  .exit_code == 1);
        // Falling stream: the fitted line passes down through the threshold.
        const auto falling = tmp.file("falling.csv");
        write_file(falling, "label,v\n?,100\n?,99\n?,95\n?,2\n?,5\n?,0\n");
        const auto t = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                               shq(falling) +
                               " --trend-attribute v --trend-threshold 50 --trend-degree 1");
        REQUIRE(t.exit_code == 0);
        CHECK(contains(t.output, "trend v (degree 1"));
        CHECK(contains(t.output, "crosses 50 from above at t="));
    }
    SUBCASE("unknown trend attribute is a data error") {
        CHECK(run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                      shq(frames) + " --trend-attribute nope --trend-threshold 50")
                  .exit_code == 2);
    }
}

TEST_CASE("cli: monitor walks image directories with rois") {
    TempDir tmp;
    // Six frames: three flat, three speckled; classifier trained on features
    // extracted by the features subcommand itself.
    const auto dir = tmp.path() / "frames";
    std::filesystem::create_directory(dir);
    for (int i = 0; i < 6; ++i) {
        const auto frame = (dir / ("frame" + std::to_string(i) + ".pgm")).string();
        if (i < 3) {
            // Flat image: encode via simulate with amplitude... simpler: write directly.
            std::string pgm = "P5\n32 32\n255\n" + std::string(32 * 32, static_cast<char>(40));
            write_file(frame, pgm);
        } else {
            REQUIRE(run_cmd(cli_path() + " simulate --width 32 --height 32 --seed " +
                            std::to_string(200 + i) + " --out " + shq(frame))
                        .exit_code == 0);
        }
    }

    const auto flat_csv = tmp.file("flat.csv");
    const auto spk_csv = tmp.file("spk.csv");
    REQUIRE(run_cmd(cli_path() + " features --image " + shq((dir / "frame0.pgm").string()) +
                    " --roi 0,0,32,32:A --label flat --out " + shq(flat_csv))
                .exit_code == 0);
    REQUIRE(run_cmd(cli_path() + " features --image " + shq((dir / "frame3.pgm").string()) +
                    " --roi 0,0,32,32:A --label speckle --out " + shq(spk_csv))
                .exit_code == 0);

    // Merge the two rows into one training CSV (shared header).
    const auto flat_text = read_file(flat_csv);
    const auto spk_text = read_file(spk_csv);
    const auto train_csv = tmp.file("train.csv");
    write_file(train_csv, flat_text + spk_text.substr(spk_text.find('\n') + 1));

    const auto model = tmp.file("m.model");
    REQUIRE(run_cmd(cli_path() + " train --algo knn --in " + shq(train_csv) + " --out " +
                    shq(model))
                .exit_code == 0);

    const auto r = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                           shq(dir.string()) + " --roi 0,0,32,32:A");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "processed 6 frames"));
    CHECK(contains(r.output, "event: frame 3"));
    CHECK(contains(r.output, "flat -> speckle"));

    SUBCASE("images without --roi are a usage error") {
        const auto bad = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                                 shq(dir.string()));
        CHECK(bad.exit_code == 1);
        CHECK(contains(bad.output, "--roi is required"));
    }
    SUBCASE("glob patterns select frames") {
        const auto g = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                               shq((dir / "frame*.pgm").string()) + " --roi 0,0,32,32:A");
        REQUIRE(g.exit_code == 0);
        CHECK(contains(g.output, "processed 6 frames"));
    }
    SUBCASE("a glob matching nothing is a data error") {
        const auto none = run_cmd(cli_path() + " monitor --model " + shq(model) + " --frames " +
                                  shq((dir / "nope*.pgm").string()) + " --roi 0,0,32,32:A");
        CHECK(none.exit_code == 2);
        CHECK(contains(none.output, "no image files matched"));
    }
}
