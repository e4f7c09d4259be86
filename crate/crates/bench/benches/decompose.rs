use criterion::{black_box, criterion_group, criterion_main, Criterion};
use refdecomp::syntax::method_tokens;
use refdecomp::{check_equivalent, decompose_pair, parse_method, token_delta, DecomposeConfig};

const RIGHT: &str = include_str!("../../../corpus/seeds/clamp.mj");

// The clamp seed with renames, a reversed guard, flipped comparisons and
// the final return folded into a variable.
const LEFT: &str = "int limit(int v, int lo, int hi) {
    if (!(lo > hi)) {
    } else {
        int t = lo;
        lo = hi;
        hi = t;
    }
    if (lo > v) {
        return lo;
    } else if (hi < v) {
        return hi;
    }
    int result = v;
    return result;
}";

fn benches(c: &mut Criterion) {
    let left = parse_method(LEFT).unwrap();
    let right = parse_method(RIGHT).unwrap();
    let (lt, rt) = (method_tokens(&left), method_tokens(&right));

    c.bench_function("token_delta", |b| b.iter(|| token_delta(black_box(&lt), black_box(&rt))));
    c.bench_function("check_equivalent/200", |b| {
        b.iter(|| check_equivalent(black_box(&left), black_box(&right), 200, 0).unwrap())
    });

    let mut group = c.benchmark_group("decompose_pair");
    group.sample_size(10);
    for (name, config) in [("detector", DecomposeConfig::detector_only()), ("all", DecomposeConfig::default())] {
        group.bench_function(name, |b| b.iter(|| decompose_pair("bench", black_box(&left), black_box(&right), &config)));
    }
    group.finish();
}

criterion_group!(decompose, benches);
criterion_main!(decompose);
