// Values computed by tests/oracle/oracles.py (mpmath, 50 digits) with
// g = 9.81, human 75 kg / 1.20 m, robot 20.2 kg / 0.55 m.
#pragma once

namespace oracle {

inline constexpr double kOmegaH = 2.8591956910991594;
inline constexpr double kOmegaR = 4.2233119274289504;
inline constexpr double kSigma1_03 = 7.0704905888930129;
inline constexpr double kSigma1_04 = 5.533477295850525;
inline constexpr double kXMinus = 0.014397210598990915;    // T = 0.3, xi = 0.05
inline constexpr double kXdotMinus = 0.101795342046476;
inline constexpr double kXiPlus = 0.02120557880201817;
inline constexpr double kRefDcm = 0.049986845909582908;    // 0.0212 e^{w 0.3}
inline constexpr double kPassiveX = 0.054449986528580613;  // from (x-, xdot-) after 0.3 s
inline constexpr double kPassiveXd = 0.18139743322272856;
inline constexpr double kDcmRobot = 0.14735619898238375;   // (0.1, 0.2)
inline constexpr double kRateGap = 0.058291451398555748;
inline constexpr double kForceToCop = -0.015126512651265127;
inline constexpr double kFextXdot = 0.15296933385363418;   // 30 N, CoP held, 0.1 s
inline constexpr double kFextX = 0.0075367744267143484;
inline constexpr double kFRef = 8.82777375;                // x = 0.014398
inline constexpr double kFfScale = 0.26933333333333333;
inline constexpr double kHmiFext30 = 111.38613861386139;
inline constexpr double kHmiTopSpeed = 114.02942204058166; // xdot_R = 0.36
inline constexpr double kStepNominal = 0.09028157068;
inline constexpr double kStepClosedLoop = 0.10528157068;
inline constexpr double kFrontalTransfer = 0.022171862911492739;

}  // namespace oracle
