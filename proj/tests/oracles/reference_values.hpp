// Frozen reference values for the test suite.
// Generated by tests/oracles/compute_reference_values.py (mpmath,
// 50-digit tanh-sinh quadrature). Do not edit by hand; regenerate
// with: python3 compute_reference_values.py > reference_values.hpp
#pragma once

namespace modstein::oracle {

inline constexpr double kZ_g1_c01 = 2.367514921516399554148169;  // normalizer, gamma=1 C=01
inline constexpr double kSigma2_g1_c01 = 0.8175614038674936393740723;  // variance
inline constexpr double kZ_g1_c13 = 2.186241765251721924399908;  // normalizer, gamma=1 C=13
inline constexpr double kSigma2_g1_c13 = 0.6449293744769164778114708;  // variance
inline constexpr double kZ_g1_c1 = 1.935247818496727276425840;  // normalizer, gamma=1 C=1
inline constexpr double kSigma2_g1_c1 = 0.4679199169736651886374213;  // variance
inline constexpr double kZ_g1_c3 = 1.635604815853873679252833;  // normalizer, gamma=1 C=3
inline constexpr double kSigma2_g1_c3 = 0.3130156269713682044770629;  // variance
inline constexpr double kZ_g2_c01 = 4.990368641983191402027397;  // normalizer, gamma=2 C=01
inline constexpr double kSigma2_g2_c01 = 3.928486516157777989931566;  // variance
inline constexpr double kZ_g2_c13 = 4.941073450423097011957416;  // normalizer, gamma=2 C=13
inline constexpr double kSigma2_g2_c13 = 3.783552377868438670187859;  // variance
inline constexpr double kZ_g2_c1 = 4.822675063273800462611437;  // normalizer, gamma=2 C=1
inline constexpr double kSigma2_g2_c1 = 3.473708120802755575769207;  // variance
inline constexpr double kZ_g2_c3 = 4.571921031024297363550977;  // normalizer, gamma=2 C=3
inline constexpr double kSigma2_g2_c3 = 2.934214416882900664059085;  // variance
inline constexpr double kZ_g5_c01 = 12.53163844758712742720515;  // normalizer, gamma=5 C=01
inline constexpr double kSigma2_g5_c01 = 24.98801532966715421432935;  // variance
inline constexpr double kZ_g5_c13 = 12.52813976306662180572668;  // normalizer, gamma=5 C=13
inline constexpr double kSigma2_g5_c13 = 24.96016955006309516130410;  // variance
inline constexpr double kZ_g5_c1 = 12.51820551864017810443090;  // normalizer, gamma=5 C=1
inline constexpr double kSigma2_g5_c1 = 24.88150636405671446881192;  // variance
inline constexpr double kZ_g5_c3 = 12.48893408807541075316270;  // normalizer, gamma=5 C=3
inline constexpr double kSigma2_g5_c3 = 24.65306210228496645496804;  // variance
inline constexpr double kM4_g1_c13 = 1.065211876569250566565587;  // E[H^4]
inline constexpr double kM6_g1_c13 = 2.608728740584496600606475;  // E[H^6]
inline constexpr double kM8_g1_c13 = 8.151991926785268696664386;  // E[H^8]
inline constexpr double kM12_g1_c13 = 129.1217987074463872417100;  // E[H^12]
inline constexpr double kM4_g2_c1 = 33.68268026862364315077076;  // E[H^4], gamma=2 C=1
inline constexpr double kAbsMean_g1_c13 = 0.6560005656065333186985694;  // E|H|
inline constexpr double kAbsMean_g2_c13 = 1.558673962712461336436279;  // E|H|
inline constexpr double kTail_g1_c13_x05 = 0.2806969977848765046614787;  // P(H >= 0.5)
inline constexpr double kTail_g1_c13_x07 = 0.2052205274626502473456197;  // P(H >= 0.7)
inline constexpr double kTail_g1_c13_x1 = 0.1138819246812664440595649;  // P(H >= 1)
inline constexpr double kPsi_g1_c13_x07 = 0.2292270626235681433216640;  // E[H 1{H>=0.7}]
inline constexpr double kPhiUp_g1_c13_x07 = 0.08557269339971297017973027;  // E[(H-0.7)+]
inline constexpr double kChiUp_g1_c13_x07 = 0.02861621027385464545221123;  // E[(H-0.7)^2 1{H>=0.7}]/2
inline constexpr double kLinvH2_g1_c13_x08 = -0.4611229132750872587862624;  // pseudo-inverse of h=x^2 at x=0.8
inline constexpr double kLinvH2_g1_c13_xm13 = 0.6355262257804100955928948;  // pseudo-inverse of h=x^2 at x=-1.3
inline constexpr double kLinvHat3_g2_c13_x08 = 12.63428380724001990633316;  // pseudo-inverse of hhat, h=x^3 (hhat = x^3 - 3 sigma2 x), gamma=2
inline constexpr double kEPhi_g1_c01 = 0.9445018016741713505299636;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g1_c13 = 0.8721842753383756048952406;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g1_c1 = 0.7720521778529822664520947;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g2_c01 = 0.9954345230382875737300255;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g2_c13 = 0.9856015549713828168563960;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g2_c1 = 0.9619844936887867931517311;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g5_c01 = 0.9998800838893356590899689;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g5_c13 = 0.9996009292531325179536145;  // E[Phi_C(G/gamma)]
inline constexpr double kEPhi_g5_c1 = 0.9988082912280223833876158;  // E[Phi_C(G/gamma)]
inline constexpr double kC1_c01 = 2.367514921516399554148169;  // c1 = sqrt(2 pi) E[Phi_C(G)]
inline constexpr double kC1_c13 = 2.186241765251721924399908;  // c1 = sqrt(2 pi) E[Phi_C(G)]
inline constexpr double kC1_c1 = 1.935247818496727276425840;  // c1 = sqrt(2 pi) E[Phi_C(G)]
inline constexpr double kHermA0_g2_c13 = 0.9856015549713828168563960;  // Hermite coefficient a_0
inline constexpr double kHermA2_g2_c13 = -0.02666638911784064249964720;  // Hermite coefficient a_2
inline constexpr double kHermA4_g2_c13 = -0.003201443341139960858637109;  // Hermite coefficient a_4
inline constexpr double kHermA6_g2_c13 = 0.0001895195746897797642777914;  // Hermite coefficient a_6
inline constexpr double kHermA8_g2_c13 = -0.000001076524828014081175004701;  // Hermite coefficient a_8
inline constexpr double kTilt_g2_c13_u05 = 0.9559219539325354468625309;  // E[Phi_{1/3}(G/2 + 0.5)]
inline constexpr double kLap_g1_c13_u05 = 0.9561391265007113593026870;  // e^{-g^2u^2/2} E[e^{uH}], gamma=1 C=1/3 u=0.5
inline constexpr double kLap_g5_c1_u2 = 0.03786376760444238776739295;  // same, gamma=5 C=1 u=2
inline constexpr double kCharfn_g2_c13_t05 = 0.6208536335160879176021209;  // E[cos(0.5 H)]
inline constexpr double kCharfn_g2_c13_t1 = 0.1412806895547296148122293;  // E[cos(H)]
inline constexpr double kFourierRatio_g1_c1_t2 = 2.598227745012788516760847;  // E[cos(2H)] e^{+g^2 t^2/2}
inline constexpr double kFourierRatio_g5_c1_t2 = 0.001724174432514278236578937;  // same, gamma=5
inline constexpr double kSigned_g2_c13_x0 = 0.1994589697802788956198685;  // mu(0), gamma=2
inline constexpr double kSigned_g2_c13_x05 = 0.1933237210656797659587760;  // mu(0.5)
inline constexpr double kSigned_g2_c13_x2 = 0.1209902818635013144093248;  // mu(2)
inline constexpr double kSigned_g1_c13_x05 = 0.3208464775846627010234872;  // mu(0.5), gamma=1
inline constexpr double kDickmanLambda1 = 0.7965995992970531342836759;  // Lambda(1)
inline constexpr double kDickmanLambda25 = 1.518421314645957661285667;  // Lambda(2.5)
inline constexpr double kDickmanLambdaPrime15 = 0.5179132265677134473778130;  // Lambda'(1.5)
inline constexpr double kDickmanUpsilon05 = 1.593624260040040092323042;  // Upsilon(0.5) = (Lambda')^{-1}(0.5)
inline constexpr double kGH5_x1 = 1.355626179974265865830521;  // inner positive node
inline constexpr double kGH5_x2 = 2.856970013872805654162304;  // outer positive node
inline constexpr double kGH5_w0 = 0.5333333333333333333333333;  // weight at 0
inline constexpr double kGH5_w1 = 0.2220759220056126443999631;  // weight at +-x1
inline constexpr double kGH5_w2 = 0.01125741132772068893337022;  // weight at +-x2
inline constexpr double kDKol_n4_c13 = 0.1875000000000000000000000;  // d_Kol(Z_4, H), C=1/3
inline constexpr double kDKol_n16_c13 = 0.09819030761718750000000000;  // d_Kol(Z_16, H), C=1/3
inline constexpr double kCorr_g2_c13_hgauss = -0.007588762073932620719482161;  // E[h(G)] - E[h(H/2)], h = exp(-x^2/2)

}  // namespace modstein::oracle
