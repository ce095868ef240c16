/// Average precision with all-point interpolation of the precision envelope.
///
/// `scored` holds `(confidence, is_true_positive)`; equal confidences keep
/// their input order. With no ground truth the score is 1 when there are no
/// predictions either, 0 otherwise.
pub fn average_precision(scored: &[(f64, bool)], gt_count: usize) -> f64 {
    if gt_count == 0 {
        return if scored.is_empty() { 1.0 } else { 0.0 };
    }
    let mut ranked = scored.to_vec();
    ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut recall = Vec::with_capacity(ranked.len());
    let mut precision = Vec::with_capacity(ranked.len());
    let mut tp = 0usize;
    for (k, &(_, hit)) in ranked.iter().enumerate() {
        if hit {
            tp += 1;
        }
        recall.push(tp as f64 / gt_count as f64);
        precision.push(tp as f64 / (k + 1) as f64);
    }
    // Envelope: precision at rank k becomes the max precision at any rank >= k.
    for k in (0..precision.len().saturating_sub(1)).rev() {
        precision[k] = precision[k].max(precision[k + 1]);
    }
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in recall.iter().zip(&precision) {
        if *r > prev_recall {
            area += (r - prev_recall) * p;
            prev_recall = *r;
        }
    }
    area
}
