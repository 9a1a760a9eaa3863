#pragma once

namespace biphoton {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.1415926535897932384626433832795;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kLn2 = 0.69314718055994530941723212145818;

// FWHM = 2*sqrt(2*ln 2) * sigma for a Gaussian
inline constexpr double kFwhmPerSigma = 2.3548200450309493820231386529194;

// Gaussian time-bandwidth product (FWHM convention), 2 ln2 / pi
inline constexpr double kGaussianTbp = 0.44127029458394530803244771007724;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace biphoton
