#ifndef SOCMAP_CLASSIFIER_IO_HPP
#define SOCMAP_CLASSIFIER_IO_HPP

#include "socmap/binio.hpp"
#include "socmap/classifiers.hpp"

namespace socmap {

// Byte-exact round trip: every float is stored raw, so a loaded model
// predicts identically to the one that was saved.
void write_classifier(BinaryWriter& w, const TrainedClassifier& m);
TrainedClassifier read_classifier(BinaryReader& r);

void write_feature_matrix(BinaryWriter& w, const FeatureMatrix& X);
FeatureMatrix read_feature_matrix(BinaryReader& r);

} // namespace socmap

#endif
