namespace rtc {}
