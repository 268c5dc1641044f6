#pragma once

// p-means frozen from tests/oracle/freeze_values.py (mpmath, 30 digits).

namespace frozen {

inline constexpr double kLevyNu12 = 4.3875426180225549;
inline constexpr double kLevyNu14 = 23.868408349447507;
inline constexpr double kChi2_5Nu1 = 4.3514601910955273;
inline constexpr double kChi2_5Nu3 = 5.6371977608880064;
inline constexpr double kSkewNormal5Nu1 = 0.67447111750284391;
inline constexpr double kSkewNormal5Nu3 = 0.87382848910638187;
inline constexpr double kLogLogistic15Nu2 = 2.4183991523122905;
inline constexpr double kWeibullHalfNu15 = 1.1111902218572089;
inline constexpr double kWeibull2Nu4 = 0.9823036908414073;

}  // namespace frozen
