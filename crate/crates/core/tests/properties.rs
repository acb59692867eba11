//! Property tests: determinism, roundtrips, and algebraic identities that
//! must hold for arbitrary inputs, not just the seeds the examples use.

use proptest::prelude::*;
use scsim_core::bitstream::{
    encode, encode_pair, inject_flips, scc, BitStream, CorrelationMode, FlipMode, FlipSpec,
};
use scsim_core::entropy::EntropySource;
use scsim_core::image::{pgm_from_bytes, pgm_to_bytes, GrayImage};
use scsim_core::logic::{gate_apply, oracle, GateKind};
use scsim_core::metrics::ssim;
use scsim_core::roberts::{reference_roberts, stochastic_roberts, DetectorConfig};
use scsim_core::stream_io::{
    streams_from_bytes, streams_from_packed, streams_from_text, streams_to_packed, streams_to_text,
    StreamFormat,
};

fn prob() -> impl Strategy<Value = f64> {
    (0..=1000u32).prop_map(|x| f64::from(x) / 1000.0)
}

fn bits(max_len: usize) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), 1..max_len)
}

fn stream_set() -> impl Strategy<Value = Vec<BitStream>> {
    proptest::collection::vec(bits(200), 1..5).prop_map(|set| {
        set.iter()
            .map(|b| BitStream::from_bits(b).unwrap())
            .collect()
    })
}

proptest! {
    #[test]
    fn encoding_is_deterministic(p in prob(), n in 1usize..2000, seed in any::<u64>()) {
        let a = encode(p, n, &EntropySource::new(seed)).unwrap();
        let b = encode(p, n, &EntropySource::new(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn decoded_value_is_a_valid_probability(p in prob(), n in 1usize..2000, seed in any::<u64>()) {
        let s = encode(p, n, &EntropySource::new(seed)).unwrap();
        prop_assert!((0.0..=1.0).contains(&s.value()));
        prop_assert_eq!(s.len(), n);
    }

    #[test]
    fn bit_packing_roundtrips(raw in bits(2000)) {
        let s = BitStream::from_bits(&raw).unwrap();
        prop_assert_eq!(s.bits(), raw.clone());
        prop_assert_eq!(s.ones() as usize, raw.iter().filter(|&&b| b).count());
    }

    #[test]
    fn text_serialization_roundtrips(streams in stream_set()) {
        let text = streams_to_text(&streams);
        let back = streams_from_text(text.as_bytes()).unwrap();
        prop_assert_eq!(back, streams);
    }

    #[test]
    fn packed_serialization_roundtrips(streams in stream_set()) {
        let data = streams_to_packed(&streams);
        let back = streams_from_packed(&data).unwrap();
        prop_assert_eq!(back, streams);
    }

    #[test]
    fn format_sniffing_accepts_both_encodings(streams in stream_set()) {
        for format in [StreamFormat::Text, StreamFormat::Packed] {
            let data = scsim_core::stream_io::streams_to_bytes(&streams, format);
            prop_assert_eq!(streams_from_bytes(&data).unwrap(), streams.clone());
        }
    }

    #[test]
    fn pgm_roundtrips_through_the_canonical_writer(
        w in 1usize..24,
        h in 1usize..24,
        fill in any::<u64>(),
    ) {
        let img = GrayImage::from_fn(w, h, |x, y| {
            (fill.wrapping_mul(x as u64 + 1).wrapping_add(y as u64 * 97) % 256) as u8
        })
        .unwrap();
        let bytes = pgm_to_bytes(&img);
        prop_assert_eq!(pgm_from_bytes(&bytes).unwrap(), img);
    }

    #[test]
    fn bitwise_gates_commute(a in bits(500), b in bits(500)) {
        let n = a.len().min(b.len());
        let sa = BitStream::from_bits(&a[..n]).unwrap();
        let sb = BitStream::from_bits(&b[..n]).unwrap();
        for kind in [GateKind::And, GateKind::Or, GateKind::Xor] {
            prop_assert_eq!(
                gate_apply(kind, &sa, &sb).unwrap(),
                gate_apply(kind, &sb, &sa).unwrap()
            );
        }
    }

    #[test]
    fn gates_act_bitwise_under_concatenation(
        a1 in bits(300), b1 in bits(300),
        a2 in bits(300), b2 in bits(300),
    ) {
        let n1 = a1.len().min(b1.len());
        let n2 = a2.len().min(b2.len());
        let (a1, b1) = (&a1[..n1], &b1[..n1]);
        let (a2, b2) = (&a2[..n2], &b2[..n2]);
        let whole_a = BitStream::from_bits(&[a1, a2].concat()).unwrap();
        let whole_b = BitStream::from_bits(&[b1, b2].concat()).unwrap();
        for kind in [GateKind::And, GateKind::Or, GateKind::Xor] {
            let whole = gate_apply(kind, &whole_a, &whole_b).unwrap();
            let part1 = gate_apply(
                kind,
                &BitStream::from_bits(a1).unwrap(),
                &BitStream::from_bits(b1).unwrap(),
            )
            .unwrap();
            let part2 = gate_apply(
                kind,
                &BitStream::from_bits(a2).unwrap(),
                &BitStream::from_bits(b2).unwrap(),
            )
            .unwrap();
            let mut spliced = part1.bits();
            spliced.extend(part2.bits());
            prop_assert_eq!(whole, BitStream::from_bits(&spliced).unwrap());
        }
    }

    #[test]
    fn complement_is_an_involution(raw in bits(2000)) {
        let s = BitStream::from_bits(&raw).unwrap();
        let c = s.complement();
        prop_assert_eq!(c.clone().complement(), s.clone());
        prop_assert_eq!(s.ones() + c.ones(), raw.len() as u64);
    }

    #[test]
    fn correlation_coefficient_stays_in_range(
        pa in prob(), pb in prob(), seed in any::<u64>(),
        mode in prop_oneof![
            Just(CorrelationMode::Uncorrelated),
            Just(CorrelationMode::Positive),
            Just(CorrelationMode::Negative),
        ],
    ) {
        let (a, b) = encode_pair(pa, pb, 512, mode, &EntropySource::new(seed)).unwrap();
        let c = scc(&a, &b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c), "scc = {}", c);
        prop_assert!((scc(&b, &a).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn flipping_twice_with_the_same_mask_restores_the_stream(
        raw in bits(1000),
        rate in (0..=500u32).prop_map(|x| f64::from(x) / 1000.0),
        seed in any::<u64>(),
        mode in prop_oneof![Just(FlipMode::IndependentPerBit), Just(FlipMode::ExactCount)],
    ) {
        let s = BitStream::from_bits(&raw).unwrap();
        let spec = FlipSpec::new(mode, rate).unwrap();
        let src = EntropySource::new(seed).substream("mask");
        let once = inject_flips(&s, &spec, &src).unwrap();
        let twice = inject_flips(&once, &spec, &src).unwrap();
        prop_assert_eq!(twice, s);
    }

    #[test]
    fn closed_forms_stay_inside_the_unit_interval(pa in prob(), pb in prob(), ps in prob()) {
        for kind in [GateKind::And, GateKind::Or, GateKind::Xor] {
            for mode in [
                CorrelationMode::Uncorrelated,
                CorrelationMode::Positive,
                CorrelationMode::Negative,
            ] {
                let p = oracle(kind, mode, pa, pb, None).unwrap();
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p), "{kind} {mode}: {p}");
            }
        }
        let p = oracle(GateKind::Mux, CorrelationMode::Uncorrelated, pa, pb, Some(ps)).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ssim_is_exactly_symmetric(
        w in 3usize..12,
        h in 3usize..12,
        fa in any::<u64>(),
        fb in any::<u64>(),
    ) {
        let a = GrayImage::from_fn(w, h, |x, y| {
            (fa.wrapping_mul(x as u64 * 31 + y as u64 + 1) % 256) as u8
        })
        .unwrap();
        let b = GrayImage::from_fn(w, h, |x, y| {
            (fb.wrapping_mul(y as u64 * 17 + x as u64 + 3) % 256) as u8
        })
        .unwrap();
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        prop_assert_eq!(ab.mean(), ba.mean());
        prop_assert!(ab.mean() <= 1.0 + 1e-12);
        prop_assert_eq!(ssim(&a, &a).unwrap().mean(), 1.0);
    }

    #[test]
    fn gradients_are_probabilities(
        w in 2usize..6,
        h in 2usize..6,
        fill in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let img = GrayImage::from_fn(w, h, |x, y| {
            (fill.wrapping_mul(x as u64 + 7).wrapping_add(y as u64 * 131) % 256) as u8
        })
        .unwrap();
        let g = stochastic_roberts(&img, &DetectorConfig::new(32, seed)).unwrap();
        let r = reference_roberts(&img).unwrap();
        for y in 0..h - 1 {
            for x in 0..w - 1 {
                prop_assert!((0.0..=1.0).contains(&g.get(x, y)));
                prop_assert!((0.0..=1.0).contains(&r.get(x, y)));
            }
        }
    }
}
