use super::EvalError;
use crate::models::Prediction;
use crate::types::{ChannelKind, ClassLabel, FeatureVector};

/// Concatenates one feature vector per modality into a single vector laid
/// out in channel order. Every channel must be present exactly once.
pub fn early_fuse(parts: &[FeatureVector]) -> Result<FeatureVector, EvalError> {
    let mut values = Vec::new();
    let mut layout = Vec::new();
    for kind in ChannelKind::ALL {
        let part = parts
            .iter()
            .find_map(|p| p.select(kind))
            .ok_or(EvalError::MissingModality(kind))?;
        values.extend_from_slice(part.values());
        layout.extend_from_slice(part.layout());
    }
    Ok(FeatureVector::new(values, layout).expect("parts are valid feature vectors"))
}

/// Majority vote over per-modality predictions.
///
/// Ties between equally voted labels go to the largest sum of normalized
/// scores (each voter's scores rescaled to sum to one), then to the lowest
/// label.
pub fn late_fuse(predictions: &[Prediction]) -> Result<ClassLabel, EvalError> {
    let first = predictions.first().ok_or(EvalError::EmptyEnsemble)?;
    let classes: Vec<ClassLabel> = first.scores.iter().map(|(c, _)| *c).collect();
    let mut votes = vec![0usize; classes.len()];
    let mut summed = vec![0.0; classes.len()];
    for p in predictions {
        let same = p.scores.len() == classes.len()
            && p.scores.iter().zip(&classes).all(|((c, _), k)| c == k);
        if !same || !classes.contains(&p.label) {
            return Err(EvalError::InconsistentClasses);
        }
        let total: f64 = p.scores.iter().map(|(_, s)| s.max(0.0)).sum();
        for (i, (_, s)) in p.scores.iter().enumerate() {
            summed[i] += if total > 0.0 {
                s.max(0.0) / total
            } else {
                1.0 / classes.len() as f64
            };
        }
        votes[classes.iter().position(|c| *c == p.label).unwrap()] += 1;
    }
    let mut best = 0;
    for i in 1..classes.len() {
        let better = votes[i] > votes[best]
            || (votes[i] == votes[best]
                && (summed[i] > summed[best]
                    || (summed[i] == summed[best] && classes[i] < classes[best])));
        if better {
            best = i;
        }
    }
    Ok(classes[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{FeatureDescriptor, FeatureName};
    use ClassLabel::{Baseline, Startle, Surprise};

    fn pred(label: ClassLabel, scores: &[(ClassLabel, f64)]) -> Prediction {
        Prediction {
            label,
            scores: scores.to_vec(),
        }
    }

    fn two(label: ClassLabel, s: f64) -> Prediction {
        pred(label, &[(Startle, s), (Surprise, 1.0 - s)])
    }

    fn part(kind: ChannelKind, base: f64) -> FeatureVector {
        FeatureVector::new(
            (0..5).map(|i| base + i as f64).collect(),
            FeatureName::ALL.map(|feature| FeatureDescriptor { channel: kind, feature }).to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn early_fusion_concatenates_in_channel_order() {
        let parts: Vec<FeatureVector> = [ChannelKind::Resp, ChannelKind::Ecg, ChannelKind::Ppg, ChannelKind::Eda]
            .iter()
            .map(|k| part(*k, 10.0 * k.index() as f64))
            .collect();
        let fused = early_fuse(&parts).unwrap();
        assert_eq!(fused.len(), 20);
        assert_eq!(fused.channels(), ChannelKind::ALL.to_vec());
        for p in &parts {
            let k = p.layout()[0].channel;
            assert_eq!(&fused.select(k).unwrap(), p);
        }
        assert_eq!(
            early_fuse(&parts[..3]).unwrap_err(),
            EvalError::MissingModality(ChannelKind::Eda)
        );
    }

    #[test]
    fn majority_and_tie_rules() {
        let v = [two(Startle, 0.9), two(Startle, 0.8), two(Startle, 0.7), two(Surprise, 0.1)];
        assert_eq!(late_fuse(&v).unwrap(), Startle);

        // 2-2 votes; summed scores Startle 1.8, Surprise 2.2
        let v = [two(Startle, 0.6), two(Startle, 0.6), two(Surprise, 0.3), two(Surprise, 0.3)];
        assert_eq!(late_fuse(&v).unwrap(), Surprise);
        // 2-2 votes; Startle voters put 1.8 on Startle, Surprise voters 1.2 on
        // Surprise; over all voters the sums are 2.6 and 1.4
        let v = [two(Startle, 0.9), two(Startle, 0.9), two(Surprise, 0.4), two(Surprise, 0.4)];
        assert_eq!(late_fuse(&v).unwrap(), Startle);

        let three = |l| pred(l, &[(Startle, 0.2), (Surprise, 0.3), (Baseline, 0.5)]);
        assert_eq!(late_fuse(&[three(Startle), three(Surprise), three(Baseline), three(Baseline)]).unwrap(), Baseline);
    }

    #[test]
    fn full_tie_goes_to_lowest_label() {
        let v = [two(Startle, 0.5), two(Surprise, 0.5)];
        assert_eq!(late_fuse(&v).unwrap(), Startle);
    }

    #[test]
    fn single_voter_passthrough_and_errors() {
        assert_eq!(late_fuse(&[two(Surprise, 0.2)]).unwrap(), Surprise);
        assert_eq!(late_fuse(&[]).unwrap_err(), EvalError::EmptyEnsemble);
        let bad = [two(Startle, 0.5), pred(Startle, &[(Startle, 0.5), (Baseline, 0.5)])];
        assert_eq!(late_fuse(&bad).unwrap_err(), EvalError::InconsistentClasses);
    }
}
